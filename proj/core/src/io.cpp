#include "btd/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace btd {
namespace io {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open file for reading: " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open file for writing: " + path);
  return os;
}

double parse_double(const std::string& token, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty()) {
    throw ValidationError("malformed number '" + token + "' in " + context);
  }
  if (!std::isfinite(v)) {
    throw ValidationError("non-finite value '" + token + "' in " + context);
  }
  return v;
}

long parse_int(const std::string& token, const std::string& context) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || token.empty()) {
    throw ValidationError("malformed integer '" + token + "' in " + context);
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

/// Next line with content; returns false at EOF.
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!split_ws(line).empty()) return true;
  }
  return false;
}

std::string expect_line(std::istream& is, const std::string& what) {
  std::string line;
  if (!next_line(is, line)) {
    throw ValidationError("unexpected end of file, expected " + what);
  }
  return line;
}

void read_matrix_rows(std::istream& is, Matrix& m, const std::string& context) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const std::vector<std::string> tokens = split_ws(expect_line(is, context + " row"));
    if (static_cast<Eigen::Index>(tokens.size()) != m.cols()) {
      throw ValidationError(context + ": expected " + std::to_string(m.cols()) +
                            " values per row, got " + std::to_string(tokens.size()));
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = parse_double(tokens[static_cast<std::size_t>(c)], context);
    }
  }
}

void write_matrix_rows(const Matrix& m, std::ostream& os) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << ' ';
      os << format_g17(m(r, c));
    }
    os << '\n';
  }
}

std::string format_f2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string format_e6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

} // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_tensor(const DenseTensor3& t, std::ostream& os) {
  os << "dims " << t.dim(0) << ' ' << t.dim(1) << ' ' << t.dim(2) << '\n';
  for (int k = 0; k < t.dim(2); ++k)
    for (int j = 0; j < t.dim(1); ++j)
      for (int i = 0; i < t.dim(0); ++i) {
        const double v = t(i, j, k);
        if (v != 0.0) {
          os << (i + 1) << ' ' << (j + 1) << ' ' << (k + 1) << ' ' << format_g17(v) << '\n';
        }
      }
}

void write_tensor_file(const DenseTensor3& t, const std::string& path) {
  auto os = open_out(path);
  write_tensor(t, os);
}

DenseTensor3 read_tensor(std::istream& is) {
  const std::vector<std::string> header = split_ws(expect_line(is, "tensor header"));
  if (header.size() != 4 || header[0] != "dims") {
    throw ValidationError("tensor file must start with a 'dims I J K' header");
  }
  const long I = parse_int(header[1], "tensor dims");
  const long J = parse_int(header[2], "tensor dims");
  const long K = parse_int(header[3], "tensor dims");
  if (I < 1 || J < 1 || K < 1) {
    throw ValidationError("tensor dims must be positive");
  }
  DenseTensor3 t(static_cast<int>(I), static_cast<int>(J), static_cast<int>(K));
  std::vector<bool> seen(t.values().size(), false);
  std::string line;
  while (next_line(is, line)) {
    const std::vector<std::string> tokens = split_ws(line);
    if (tokens.size() != 4) {
      throw ValidationError("tensor entry must be 'i j k value', got: " + line);
    }
    const long i = parse_int(tokens[0], "tensor entry");
    const long j = parse_int(tokens[1], "tensor entry");
    const long k = parse_int(tokens[2], "tensor entry");
    if (i < 1 || i > I || j < 1 || j > J || k < 1 || k > K) {
      throw ValidationError("tensor entry index out of range: " + line);
    }
    const std::size_t flat = static_cast<std::size_t>(i - 1) +
                             static_cast<std::size_t>(I) * (static_cast<std::size_t>(j - 1) +
                                                            static_cast<std::size_t>(J) *
                                                                static_cast<std::size_t>(k - 1));
    if (seen[flat]) {
      throw ValidationError("duplicate tensor coordinate: " + line);
    }
    seen[flat] = true;
    t.values()[flat] = parse_double(tokens[3], "tensor entry");
  }
  return t;
}

DenseTensor3 read_tensor_file(const std::string& path) {
  auto is = open_in(path);
  return read_tensor(is);
}

void write_model(const Ll1Model& model, std::ostream& os) {
  model.validate();
  os << "btdmodel-v1\n";
  os << "dims " << model.dim_i() << ' ' << model.dim_j() << ' ' << model.dim_k() << '\n';
  os << "structure";
  for (int l : model.structure.ranks()) os << ' ' << l;
  os << '\n';
  os << "init " << to_string(model.fit.init) << '\n';
  os << "converged " << (model.fit.converged ? 1 : 0) << '\n';
  os << "iterations " << model.fit.iterations << '\n';
  os << "final_cost " << format_g17(model.fit.final_cost) << '\n';
  os << "relative_error " << format_g17(model.fit.relative_error) << '\n';
  os << "pinv_fallback " << (model.fit.pinv_fallback ? 1 : 0) << '\n';
  os << "gevd_fallback " << (model.fit.gevd_fallback ? 1 : 0) << '\n';
  for (std::size_t r = 0; r < model.blocks.size(); ++r) {
    const Ll1Block& blk = model.blocks[r];
    os << "block " << (r + 1) << '\n';
    os << "A\n";
    write_matrix_rows(blk.A, os);
    os << "B\n";
    write_matrix_rows(blk.B, os);
    os << "c\n";
    write_matrix_rows(blk.c.transpose(), os);
  }
  os << "end\n";
}

void write_model_file(const Ll1Model& model, const std::string& path) {
  auto os = open_out(path);
  write_model(model, os);
}

Ll1Model read_model(std::istream& is) {
  if (expect_line(is, "model version tag") != "btdmodel-v1") {
    throw ValidationError("unsupported model file: expected version tag 'btdmodel-v1'");
  }
  const std::vector<std::string> dims = split_ws(expect_line(is, "model dims"));
  if (dims.size() != 4 || dims[0] != "dims") {
    throw ValidationError("model file: expected 'dims I J K'");
  }
  const int I = static_cast<int>(parse_int(dims[1], "model dims"));
  const int J = static_cast<int>(parse_int(dims[2], "model dims"));
  const int K = static_cast<int>(parse_int(dims[3], "model dims"));

  const std::vector<std::string> sline = split_ws(expect_line(is, "model structure"));
  if (sline.size() < 2 || sline[0] != "structure") {
    throw ValidationError("model file: expected 'structure L1 ... LR'");
  }
  std::vector<int> ranks;
  for (std::size_t i = 1; i < sline.size(); ++i) {
    ranks.push_back(static_cast<int>(parse_int(sline[i], "model structure")));
  }

  Ll1Model model;
  model.structure = BlockStructure(ranks);

  // metadata lines in fixed order
  auto keyed = [&](const char* key) -> std::string {
    const std::vector<std::string> tokens = split_ws(expect_line(is, key));
    if (tokens.size() != 2 || tokens[0] != key) {
      throw ValidationError(std::string("model file: expected '") + key + " <value>'");
    }
    return tokens[1];
  };
  const std::string init = keyed("init");
  if (init != "gevd" && init != "random") {
    throw ValidationError("model file: init must be gevd or random");
  }
  model.fit.init = init == "gevd" ? InitKind::gevd : InitKind::random;
  model.fit.converged = parse_int(keyed("converged"), "converged") != 0;
  model.fit.iterations = static_cast<int>(parse_int(keyed("iterations"), "iterations"));
  model.fit.final_cost = parse_double(keyed("final_cost"), "final_cost");
  model.fit.relative_error = parse_double(keyed("relative_error"), "relative_error");
  model.fit.pinv_fallback = parse_int(keyed("pinv_fallback"), "pinv_fallback") != 0;
  model.fit.gevd_fallback = parse_int(keyed("gevd_fallback"), "gevd_fallback") != 0;

  for (int r = 0; r < model.structure.num_blocks(); ++r) {
    const std::vector<std::string> bline = split_ws(expect_line(is, "block header"));
    if (bline.size() != 2 || bline[0] != "block" ||
        parse_int(bline[1], "block index") != r + 1) {
      throw ValidationError("model file: expected 'block " + std::to_string(r + 1) + "'");
    }
    Ll1Block blk;
    if (expect_line(is, "factor tag") != "A") throw ValidationError("model file: expected 'A'");
    blk.A.resize(I, model.structure.rank(r));
    read_matrix_rows(is, blk.A, "factor A");
    if (expect_line(is, "factor tag") != "B") throw ValidationError("model file: expected 'B'");
    blk.B.resize(J, model.structure.rank(r));
    read_matrix_rows(is, blk.B, "factor B");
    if (expect_line(is, "factor tag") != "c") throw ValidationError("model file: expected 'c'");
    Matrix crow(1, K);
    read_matrix_rows(is, crow, "factor c");
    blk.c = crow.transpose();
    model.blocks.push_back(std::move(blk));
  }
  if (expect_line(is, "end tag") != "end") {
    throw ValidationError("model file: expected trailing 'end'");
  }
  model.validate();
  return model;
}

Ll1Model read_model_file(const std::string& path) {
  auto is = open_in(path);
  return read_model(is);
}

void write_report_csv(const ConsistencyReport& report, std::ostream& os) {
  os << "structure,mean_pct,sd_pct,mean_rel_err,repeats,failures\n";
  for (const ReportRow& row : report.rows) {
    os << '"' << row.structure.to_string() << '"' << ',';
    if (row.mean_pct) {
      os << format_f2(*row.mean_pct) << ',' << format_f2(row.sd_pct) << ','
         << format_e6(row.mean_relative_error.value_or(0.0));
    } else {
      os << ",,";
    }
    os << ',' << row.repeats << ',' << row.failures << '\n';
  }
}

void write_report_csv_file(const ConsistencyReport& report, const std::string& path) {
  auto os = open_out(path);
  write_report_csv(report, os);
}

std::string format_report_text(const ConsistencyReport& report, std::size_t top_n) {
  std::ostringstream os;
  os << "rank      structure    mean%      sd%   rel.err  fails\n";
  std::size_t shown = 0;
  for (const ReportRow& row : report.rows) {
    if (shown++ == top_n) break;
    char buf[128];
    if (row.mean_pct) {
      std::snprintf(buf, sizeof(buf), "%4zu %12s %8.2f %8.2f %9.2e %4d/%d\n", shown,
                    row.structure.to_string().c_str(), *row.mean_pct, row.sd_pct,
                    row.mean_relative_error.value_or(0.0), row.failures, row.repeats);
    } else {
      std::snprintf(buf, sizeof(buf), "%4zu %12s %8s %8s %9s %4d/%d\n", shown,
                    row.structure.to_string().c_str(), "-", "-", "-", row.failures, row.repeats);
    }
    os << buf;
  }
  if (!report.skipped.empty()) {
    os << report.skipped.size() << " candidate(s) skipped\n";
  }
  return os.str();
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& os) {
  os << "snr_db,consistency_pct,relative_error\n";
  for (const SweepRow& row : sweep.rows) {
    os << format_g17(row.snr_db) << ',' << format_f2(row.consistency_pct) << ','
       << format_e6(row.relative_error) << '\n';
  }
}

void write_sweep_csv_file(const SweepResult& sweep, const std::string& path) {
  auto os = open_out(path);
  write_sweep_csv(sweep, os);
}

} // namespace io
} // namespace btd
