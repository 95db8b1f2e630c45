#include "hyperion/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hyperion {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, int column,
                             const std::string& msg) {
    throw SpecError(path + ":" + std::to_string(line) + ":" + std::to_string(column) +
                    ": " + msg);
}

double parse_num(const std::string& path, int line, int col, const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        parse_fail(path, line, col, "expected number, got '" + tok + "'");
    return v;
}

std::complex<double> parse_pair(const std::string& path, int line, int col,
                                const std::string& tok) {
    auto sep = tok.find(':');
    if (sep == std::string::npos)
        parse_fail(path, line, col, "expected re:im pair, got '" + tok + "'");
    return {parse_num(path, line, col, tok.substr(0, sep)),
            parse_num(path, line, col, tok.substr(sep + 1))};
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

CVec parse_spectrum_line(const std::string& path, int line, const std::string& text,
                         int k) {
    auto toks = split_ws(text);
    if (static_cast<int>(toks.size()) != k)
        parse_fail(path, line, 1,
                   "inconsistent band count: expected " + std::to_string(k) +
                       " re:im pairs, got " + std::to_string(toks.size()));
    CVec v(k);
    for (int i = 0; i < k; ++i) v[i] = parse_pair(path, line, i + 1, toks[i]);
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw SpecError("cannot write " + tmp);
        os << content;
        if (!os) throw SpecError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SpecError("cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

SpectrumSet read_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SpecError("cannot read " + path);
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line()) parse_fail(path, 1, 1, "empty file");
    auto toks = split_ws(line);
    if (toks.size() != 4 || toks[0] != "#grid")
        parse_fail(path, lineno, 1, "malformed header: expected '#grid f_start f_step k'");
    double f_start = parse_num(path, lineno, 2, toks[1]);
    double f_step = parse_num(path, lineno, 3, toks[2]);
    int k = static_cast<int>(parse_num(path, lineno, 4, toks[3]));
    FrequencyGrid grid(f_start, f_step, k);

    if (!next_line() || split_ws(line) != std::vector<std::string>{"#reference"})
        parse_fail(path, lineno, 1, "expected '#reference'");
    if (!next_line()) parse_fail(path, lineno, 1, "missing reference spectrum");
    CVec reference = parse_spectrum_line(path, lineno, line, k);

    std::vector<SampleSpectrum> samples;
    while (next_line()) {
        toks = split_ws(line);
        if (toks.size() != 3 || toks[0] != "#sample")
            parse_fail(path, lineno, 1, "expected '#sample <label> <thickness_mm>'");
        SampleSpectrum s;
        s.label = toks[1];
        s.thickness_mm = parse_num(path, lineno, 3, toks[2]);
        if (!(s.thickness_mm > 0))
            parse_fail(path, lineno, 3, "nonpositive thickness");
        if (!next_line()) parse_fail(path, lineno, 1, "missing sample spectrum");
        s.spectrum = parse_spectrum_line(path, lineno, line, k);
        samples.push_back(std::move(s));
    }
    return SpectrumSet(grid, std::move(reference), std::move(samples));
}

void write_dataset(const SpectrumSet& set, const std::string& path) {
    set.validate();
    std::ostringstream os;
    os << "#grid " << format_double(set.grid.f_start) << ' '
       << format_double(set.grid.f_step) << ' ' << set.grid.k << '\n';
    auto emit = [&os](const CVec& v) {
        for (int i = 0; i < v.size(); ++i) {
            if (i) os << ' ';
            os << format_double(v[i].real()) << ':' << format_double(v[i].imag());
        }
        os << '\n';
    };
    os << "#reference\n";
    emit(set.reference);
    for (const auto& s : set.samples) {
        os << "#sample " << s.label << ' ' << format_double(s.thickness_mm) << '\n';
        emit(s.spectrum);
    }
    write_text_file(path, os.str());
}

SpectrumSet restrict_band(const SpectrumSet& set, double lo_thz, double hi_thz) {
    if (!(lo_thz < hi_thz)) throw SpecError("restrict_band: need lo < hi");
    const double tol = 1e-9;
    int first = -1, count = 0;
    for (int i = 0; i < set.grid.k; ++i) {
        double f = set.grid.freq(i);
        if (f >= lo_thz - tol && f <= hi_thz + tol) {
            if (first < 0) first = i;
            ++count;
        }
    }
    if (count < 2)
        throw SpecError("restrict_band: band [" + std::to_string(lo_thz) + "," +
                        std::to_string(hi_thz) + "] selects fewer than 2 grid points");
    SpectrumSet out;
    out.grid = FrequencyGrid(set.grid.freq(first), set.grid.f_step, count);
    out.reference = set.reference.segment(first, count);
    for (const auto& s : set.samples) {
        SampleSpectrum t = s;
        t.spectrum = s.spectrum.segment(first, count);
        out.samples.push_back(std::move(t));
    }
    return out;
}

SignatureSet read_signatures_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SpecError("cannot read " + path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) parse_fail(path, 1, 1, "empty file");
    ++lineno;
    std::vector<std::string> header;
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "label")
        parse_fail(path, 1, 1, "expected header 'label,f_1,...'");
    int k = static_cast<int>(header.size()) - 1;
    std::vector<double> freqs(k);
    for (int i = 0; i < k; ++i) freqs[i] = parse_num(path, 1, i + 2, header[i + 1]);

    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        labels.push_back(cell);
        std::vector<double> row;
        int col = 2;
        while (std::getline(ls, cell, ','))
            row.push_back(parse_num(path, lineno, col++, cell));
        if (static_cast<int>(row.size()) != k)
            parse_fail(path, lineno, 1, "inconsistent band count");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) parse_fail(path, lineno, 1, "need at least 2 signatures");

    double step = k > 1 ? freqs[1] - freqs[0] : 0.01;
    SignatureSet sigs;
    sigs.grid = FrequencyGrid(freqs[0], step, k);
    sigs.labels = std::move(labels);
    sigs.S.resize(k, static_cast<int>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j)
        for (int i = 0; i < k; ++i) sigs.S(i, static_cast<int>(j)) = rows[j][i];
    sigs.validate();
    return sigs;
}

void write_signatures_csv(const SignatureSet& sigs, const std::string& path) {
    std::ostringstream os;
    os << "label";
    for (int i = 0; i < sigs.bands(); ++i) os << ',' << format_double(sigs.grid.freq(i));
    os << '\n';
    for (int j = 0; j < sigs.materials(); ++j) {
        os << (j < static_cast<int>(sigs.labels.size()) ? sigs.labels[j]
                                                        : "m" + std::to_string(j));
        for (int i = 0; i < sigs.bands(); ++i) os << ',' << format_double(sigs.S(i, j));
        os << '\n';
    }
    write_text_file(path, os.str());
}

AbundanceMatrix read_abundances_csv(const std::string& path,
                                    std::vector<std::string>* material_labels) {
    std::ifstream is(path);
    if (!is) throw SpecError("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) parse_fail(path, 1, 1, "empty file");
    int ncols = 0;
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) ++ncols;
    }
    int l = ncols - 1;
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        if (material_labels) material_labels->push_back(cell);
        std::vector<double> row;
        int col = 2;
        while (std::getline(ls, cell, ','))
            row.push_back(parse_num(path, lineno, col++, cell));
        if (static_cast<int>(row.size()) != l)
            parse_fail(path, lineno, 1, "inconsistent column count");
        rows.push_back(std::move(row));
    }
    Mat T(rows.size(), l);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < l; ++j) T(static_cast<int>(i), j) = rows[i][j];
    return AbundanceMatrix(T);
}

void write_abundances_csv(const AbundanceMatrix& ab,
                          const std::vector<std::string>& material_labels,
                          const std::vector<std::string>& sample_labels,
                          const std::string& path) {
    std::ostringstream os;
    os << "material";
    for (int j = 0; j < ab.sample_count(); ++j)
        os << ','
           << (j < static_cast<int>(sample_labels.size()) ? sample_labels[j]
                                                          : "s" + std::to_string(j));
    os << '\n';
    for (int i = 0; i < ab.materials(); ++i) {
        os << (i < static_cast<int>(material_labels.size()) ? material_labels[i]
                                                            : "m" + std::to_string(i));
        for (int j = 0; j < ab.sample_count(); ++j)
            os << ',' << format_double(ab.matrix()(i, j));
        os << '\n';
    }
    write_text_file(path, os.str());
}

}  // namespace hyperion
