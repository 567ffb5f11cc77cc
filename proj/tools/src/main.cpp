// btd: simulate, decompose, diagnose and rank-search rank-(Lr,Lr,1) block
// term models on dense 3-way tensors.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "btd/corcondia.hpp"
#include "btd/datagen.hpp"
#include "btd/io.hpp"
#include "btd/ll1.hpp"
#include "btd/rank_search.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::array<int, 3> parse_dims(const std::vector<int>& dims) {
  if (dims.size() != 3) {
    throw btd::ValidationError("--dims expects exactly three comma-separated sizes I,J,K");
  }
  for (int d : dims) {
    if (d < 1) throw btd::ValidationError("--dims entries must be positive");
  }
  return {dims[0], dims[1], dims[2]};
}

btd::BlockStructure parse_structure(const std::vector<int>& l) {
  if (l.empty()) throw btd::ValidationError("--L expects a comma-separated list of block ranks");
  return btd::BlockStructure(l);
}

void print_warnings(const btd::Ll1Model& model) {
  for (const std::string& w : model.fit.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

int cmd_simulate(const std::vector<int>& dims, const std::vector<int>& l, std::uint64_t seed,
                 const std::optional<double>& snr, const std::string& out) {
  btd::SimSpec spec;
  spec.dims = parse_dims(dims);
  spec.structure = parse_structure(l);
  spec.seed = seed;
  spec.snr_db = snr;
  btd::GeneratedTensor gen = btd::generate(spec);
  btd::io::write_tensor_file(gen.tensor, out);
  const std::string model_path = out + ".model";
  btd::io::write_model_file(gen.ground_truth, model_path);
  std::cout << "tensor " << out << "\n";
  std::cout << "ground-truth model " << model_path << "\n";
  return kExitOk;
}

int cmd_decompose(const std::string& input, const std::vector<int>& l, const std::string& init,
                  int max_iter, double tol, int restarts, std::uint64_t seed,
                  const std::string& out) {
  btd::DenseTensor3 t = btd::io::read_tensor_file(input);
  btd::FitOptions opts;
  opts.max_iter = max_iter;
  opts.tol = tol;
  opts.restarts = restarts;
  opts.seed = seed;
  if (init == "gevd") {
    opts.init = btd::InitKind::gevd;
  } else if (init == "random") {
    opts.init = btd::InitKind::random;
  } else {
    throw btd::ValidationError("--init must be gevd or random");
  }
  btd::Ll1Model model = btd::fit_ll1(t, parse_structure(l), opts);
  print_warnings(model);
  btd::io::write_model_file(model, out);
  std::cout << "structure " << model.structure.to_string() << "\n";
  std::cout << "init " << btd::to_string(model.fit.init) << "\n";
  std::cout << "iterations " << model.fit.iterations << "\n";
  std::cout << "converged " << (model.fit.converged ? "yes" : "no") << "\n";
  std::cout << "final_cost " << btd::io::format_g17(model.fit.final_cost) << "\n";
  std::cout << "relative_error " << btd::io::format_g17(model.fit.relative_error) << "\n";
  std::cout << "model " << out << "\n";
  return model.fit.converged ? kExitOk : kExitNumerical;
}

int cmd_diagnose(const std::string& input, const std::string& model_path,
                 const std::string& dump_core) {
  btd::DenseTensor3 t = btd::io::read_tensor_file(input);
  btd::Ll1Model model = btd::io::read_model_file(model_path);
  btd::ConsistencyResult result = btd::btd_corcondia(t, model);
  if (result.core.rank_deficient) {
    std::cerr << "warning: expanded factors are rank deficient; core computed as the "
                 "minimum-norm least-squares solution\n";
  }
  if (!dump_core.empty()) {
    btd::io::write_tensor_file(result.core.values, dump_core);
  }
  std::printf("%.2f\n", result.percentage);
  return kExitOk;
}

int cmd_search(const std::string& input, int max_r, int max_l, int repeats, std::uint64_t seed,
               const std::string& out, int threads, bool no_cpd, int max_iter, double tol,
               int restarts) {
  btd::DenseTensor3 t = btd::io::read_tensor_file(input);
  btd::SearchSpace space;
  space.max_R = max_r;
  space.max_L = max_l;
  space.include_cpd = !no_cpd;
  btd::FitOptions opts;
  opts.max_iter = max_iter;
  opts.tol = tol;
  opts.restarts = restarts;
  if (threads == 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  btd::ConsistencyReport report = btd::grid_search(t, space, repeats, seed, opts, threads);
  for (const btd::SkippedCandidate& s : report.skipped) {
    std::cerr << "skipped " << s.structure.to_string() << ": " << s.reason << "\n";
  }
  btd::io::write_report_csv_file(report, out);
  std::cout << btd::io::format_report_text(report);
  std::cout << "report " << out << "\n";
  return kExitOk;
}

int cmd_sweep_snr(const std::vector<int>& dims, const std::vector<int>& l, std::uint64_t seed,
                  const std::vector<double>& snr_list, const std::string& out) {
  btd::SimSpec spec;
  spec.dims = parse_dims(dims);
  spec.structure = parse_structure(l);
  spec.seed = seed;
  btd::SweepResult sweep = btd::snr_sweep(spec, snr_list);
  btd::io::write_sweep_csv_file(sweep, out);
  return kExitOk;
}

int cmd_transform(const std::string& model_path, std::uint64_t seed, const std::string& out) {
  btd::Ll1Model model = btd::io::read_model_file(model_path);
  std::vector<btd::Matrix> transforms = btd::random_block_transforms(model.structure, seed);
  btd::Ll1Model moved = btd::apply_block_transform(model, transforms);
  btd::io::write_model_file(moved, out);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-(Lr,Lr,1) block term decomposition with core consistency diagnostics"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic tensor with ground truth");
  std::vector<int> dims, l;
  std::uint64_t seed = 0;
  double snr = 0.0;
  std::string out, input, model_path, init = "gevd", dump_core;
  simulate->add_option("--dims", dims, "tensor sizes I,J,K")->required()->delimiter(',');
  simulate->add_option("--L", l, "block ranks L1,L2,...")->required()->delimiter(',');
  simulate->add_option("--seed", seed, "random seed");
  auto* snr_opt = simulate->add_option("--snr", snr, "signal-to-noise ratio in dB");
  simulate->add_option("--out", out, "output tensor path")->required();

  // decompose
  auto* decompose = app.add_subcommand("decompose", "fit a block term model to a tensor");
  int max_iter = 500, restarts = 5;
  double tol = 1e-8;
  decompose->add_option("--input", input, "tensor file")->required();
  decompose->add_option("--L", l, "block ranks L1,L2,...")->required()->delimiter(',');
  decompose->add_option("--init", init, "gevd or random");
  decompose->add_option("--max-iter", max_iter, "ALS sweep limit per restart");
  decompose->add_option("--tol", tol, "relative cost change for convergence");
  decompose->add_option("--restarts", restarts, "number of restarts, best kept");
  decompose->add_option("--seed", seed, "random seed");
  decompose->add_option("--out", out, "output model path")->required();

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "core consistency of a fitted model");
  diagnose->add_option("--input", input, "tensor file")->required();
  diagnose->add_option("--model", model_path, "model file")->required();
  diagnose->add_option("--dump-core", dump_core, "write the computed core to this path");

  // search
  auto* search = app.add_subcommand("search", "grid-search structures ranked by consistency");
  int max_r = 6, max_l = 6, repeats = 20, threads = 0;
  bool no_cpd = false;
  int search_max_iter = 200, search_restarts = 2;
  double search_tol = 1e-8;
  search->add_option("--input", input, "tensor file")->required();
  search->add_option("--max-R", max_r, "largest number of blocks");
  search->add_option("--max-L", max_l, "largest block rank");
  search->add_option("--repeats", repeats, "fits per candidate");
  search->add_option("--seed", seed, "random seed");
  search->add_option("--out", out, "report CSV path")->required();
  search->add_option("--threads", threads, "worker threads (0 = all available)");
  search->add_flag("--no-cpd", no_cpd, "drop the all-ones (pure CPD) candidates");
  search->add_option("--max-iter", search_max_iter, "ALS sweep limit per restart");
  search->add_option("--tol", search_tol, "relative cost change for convergence");
  search->add_option("--restarts", search_restarts, "restarts per fit");

  // sweep-snr
  auto* sweep = app.add_subcommand("sweep-snr", "consistency vs noise on the ground-truth factors");
  std::vector<double> snr_list;
  sweep->add_option("--dims", dims, "tensor sizes I,J,K")->required()->delimiter(',');
  sweep->add_option("--L", l, "block ranks L1,L2,...")->required()->delimiter(',');
  sweep->add_option("--seed", seed, "random seed");
  sweep->add_option("--snr-list", snr_list, "SNR points in dB, strictly ordered")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out, "sweep CSV path")->required();

  // transform
  auto* transform = app.add_subcommand("transform", "apply random per-block F transforms");
  transform->add_option("--model", model_path, "model file")->required();
  transform->add_option("--seed", seed, "random seed");
  transform->add_option("--out", out, "output model path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      std::optional<double> snr_db;
      if (snr_opt->count() > 0) snr_db = snr;
      return cmd_simulate(dims, l, seed, snr_db, out);
    }
    if (decompose->parsed()) {
      return cmd_decompose(input, l, init, max_iter, tol, restarts, seed, out);
    }
    if (diagnose->parsed()) {
      return cmd_diagnose(input, model_path, dump_core);
    }
    if (search->parsed()) {
      return cmd_search(input, max_r, max_l, repeats, seed, out, threads, no_cpd, search_max_iter,
                        search_tol, search_restarts);
    }
    if (sweep->parsed()) {
      return cmd_sweep_snr(dims, l, seed, snr_list, out);
    }
    if (transform->parsed()) {
      return cmd_transform(model_path, seed, out);
    }
  } catch (const btd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const btd::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const btd::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
