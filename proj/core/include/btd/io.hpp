#pragma once

#include <iosfwd>
#include <string>

#include "btd/datagen.hpp"
#include "btd/ll1.hpp"
#include "btd/rank_search.hpp"
#include "btd/tensor.hpp"

namespace btd {
namespace io {

/// Coordinate text format: a "dims I J K" header followed by one
/// "i j k value" line per nonzero entry (1-based indices); entries absent
/// from the file are zero. Values are written with 17 significant digits,
/// so a write/read round trip is exact.
void write_tensor(const DenseTensor3& t, std::ostream& os);
void write_tensor_file(const DenseTensor3& t, const std::string& path);
DenseTensor3 read_tensor(std::istream& is);
DenseTensor3 read_tensor_file(const std::string& path);

/// Structured text model document, version tag "btdmodel-v1": dims,
/// structure, fit metadata, then per-block factors (A and B one row per
/// line, c on a single line) at 17 significant digits.
void write_model(const Ll1Model& model, std::ostream& os);
void write_model_file(const Ll1Model& model, const std::string& path);
Ll1Model read_model(std::istream& is);
Ll1Model read_model_file(const std::string& path);

/// CSV with header "structure,mean_pct,sd_pct,mean_rel_err,repeats,failures".
/// Percentages carry two decimals; rows whose fits all failed leave the mean
/// columns empty.
void write_report_csv(const ConsistencyReport& report, std::ostream& os);
void write_report_csv_file(const ConsistencyReport& report, const std::string& path);

/// Human-readable ranking of the top rows.
std::string format_report_text(const ConsistencyReport& report, std::size_t top_n = 10);

/// CSV with header "snr_db,consistency_pct,relative_error".
void write_sweep_csv(const SweepResult& sweep, std::ostream& os);
void write_sweep_csv_file(const SweepResult& sweep, const std::string& path);

/// Shortest-of-17-significant-digits rendering used by all file formats.
std::string format_g17(double v);

} // namespace io
} // namespace btd
