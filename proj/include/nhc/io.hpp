#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "nhc/dynamics.hpp"

namespace nhc::io {

enum class Format { csv, jsonl };

std::string_view to_string(Format f);
Format format_from_string(std::string_view s);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Header row: t, Re_z_*, Im_z_*, Re_B_* (row-major), Im_B_*, Re_alpha, Im_alpha.
std::string complex_csv_header(Index n);
/// Header row: t, Z_*, G_* (row-major), beta.
std::string real_csv_header(Index n);

/// Every stride-th sample plus the last one. A breakdown report becomes the
/// footer `# breakdown t=<value> reason=<enum>` (csv) or a final
/// {"breakdown": {...}} record (jsonl).
void write_trajectory(std::ostream& os, const ComplexTrajectory& tr, Format f, std::size_t stride = 1);
void write_trajectory(std::ostream& os, const RealTrajectory& tr, Format f, std::size_t stride = 1);

ComplexTrajectory read_complex_trajectory(std::istream& is, Format f);
RealTrajectory read_real_trajectory(std::istream& is, Format f);

/// Writes to a file; throws Error(config) when it cannot be opened.
void write_file(const std::string& path, const ComplexTrajectory& tr, Format f, std::size_t stride = 1);
void write_file(const std::string& path, const RealTrajectory& tr, Format f, std::size_t stride = 1);

}  // namespace nhc::io
