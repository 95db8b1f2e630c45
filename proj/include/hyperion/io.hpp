#ifndef HYPERION_IO_HPP
#define HYPERION_IO_HPP

#include <string>

#include "hyperion/types.hpp"

namespace hyperion {

// Text dataset format:
//   #grid f_start f_step k
//   #reference
//   re:im re:im ... (k pairs)
//   #sample <label> <thickness_mm>
//   re:im re:im ... (k pairs)
// Values serialized at 17 significant digits; round trips bit-exactly.
SpectrumSet read_dataset(const std::string& path);
void write_dataset(const SpectrumSet& set, const std::string& path);

/// Truncate to bands with lo <= f <= hi. Throws on empty intersection.
SpectrumSet restrict_band(const SpectrumSet& set, double lo_thz, double hi_thz);

// CSV: header "label,f_1,...,f_k", one row per material.
SignatureSet read_signatures_csv(const std::string& path);
void write_signatures_csv(const SignatureSet& sigs, const std::string& path);

// CSV: header "material,<sample labels...>", one row per material.
AbundanceMatrix read_abundances_csv(const std::string& path,
                                    std::vector<std::string>* material_labels = nullptr);
void write_abundances_csv(const AbundanceMatrix& ab,
                          const std::vector<std::string>& material_labels,
                          const std::vector<std::string>& sample_labels,
                          const std::string& path);

/// Serialize a double at 17 significant digits.
std::string format_double(double v);

/// Write text to path atomically (temp file + rename).
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace hyperion

#endif
