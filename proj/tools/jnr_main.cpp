// jnr: joint-numerical-range toolkit command line.
//
// Every subcommand reads operators from the shared JSON format, computes
// deterministically for a fixed (inputs, flags, seed) triple, and writes its
// artifacts atomically. Module errors exit 1 with a machine-readable JSON
// diagnostic on stderr; configuration errors exit 2.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/classify.hpp"
#include "jnr/hermitian.hpp"
#include "jnr/operator_io.hpp"
#include "jnr/phase.hpp"
#include "jnr/separable.hpp"
#include "jnr/spin_chains.hpp"
#include "jnr/thermal.hpp"
#include "jnr/uncertainty.hpp"

namespace {

using jnr::format_double;

std::vector<std::string> split_list(const std::string& joined) {
  std::vector<std::string> parts;
  std::stringstream stream(joined);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<jnr::HermitianOperator> load_operators(const std::string& joined) {
  std::vector<jnr::HermitianOperator> ops;
  for (const std::string& path : split_list(joined))
    ops.push_back(jnr::parse_operator_file(path));
  if (ops.empty()) throw jnr::InvalidArgument("no operator files given");
  return ops;
}

jnr::DirectionStrategy parse_strategy(const std::string& name, int k) {
  if (name == "grid2d") return jnr::DirectionStrategy::grid2d;
  if (name == "fibonacci3d") return jnr::DirectionStrategy::fibonacci3d;
  if (name == "seeded-uniform" || name == "seeded_uniform")
    return jnr::DirectionStrategy::seeded_uniform;
  if (name == "auto") {
    if (k == 2) return jnr::DirectionStrategy::grid2d;
    if (k == 3) return jnr::DirectionStrategy::fibonacci3d;
    return jnr::DirectionStrategy::seeded_uniform;
  }
  throw jnr::InvalidArgument("unknown direction strategy: " + name);
}

std::vector<double> parse_betas(const std::string& joined) {
  std::vector<double> betas;
  for (const std::string& item : split_list(joined)) {
    if (item == "inf" || item == "Inf" || item == "INF")
      betas.push_back(std::numeric_limits<double>::infinity());
    else
      betas.push_back(std::stod(item));
  }
  if (betas.empty()) throw jnr::InvalidArgument("no beta values given");
  return betas;
}

std::string csv_cell(double value) { return format_double(value); }

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::json flat_part_json(const jnr::FlatPart& part) {
  nlohmann::json j;
  switch (part.kind) {
    case jnr::FlatPartKind::segment:
      j["kind"] = "segment";
      break;
    case jnr::FlatPartKind::ellipse:
      j["kind"] = "ellipse";
      break;
    case jnr::FlatPartKind::filled_ellipse_degenerate:
      j["kind"] = "filled_ellipse_degenerate";
      break;
  }
  nlohmann::json span = nlohmann::json::array();
  for (const auto& axis : part.semi_axes) {
    Eigen::VectorXd unit = axis;
    if (unit.norm() > 0) unit /= unit.norm();
    span.push_back(vector_json(unit));
  }
  j["carrier"] = {{"point", vector_json(part.center)}, {"span", span}};
  if (part.kind == jnr::FlatPartKind::segment) {
    j["extent"] = {{"endpoints",
                    nlohmann::json::array({vector_json(part.endpoint_a()),
                                           vector_json(part.endpoint_b())})}};
  } else {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& axis : part.semi_axes) axes.push_back(vector_json(axis));
    j["extent"] = {{"center", vector_json(part.center)}, {"semi_axes", axes}};
  }
  j["direction"] = vector_json(part.direction.vec());
  j["multiplicity"] = part.multiplicity;
  return j;
}

int run_boundary(const std::string& ops_arg, int num_directions,
                 const std::string& strategy_name, double gap_tol, int depth,
                 std::uint64_t seed, int threads, const std::string& out) {
  const jnr::ObservableSet set(load_operators(ops_arg));
  const int k = set.k();
  std::vector<jnr::Direction> directions;
  if (k == 1) {
    directions = jnr::default_directions(1, 2);
  } else {
    directions = jnr::sample_directions(
        k, num_directions, parse_strategy(strategy_name, k), seed);
  }
  const jnr::BoundaryResult result =
      jnr::boundary_general(set, directions, gap_tol, depth, threads);

  std::string csv;
  for (int i = 0; i < k; ++i) csv += "dir_" + std::to_string(i + 1) + ",";
  for (int i = 0; i < k; ++i) csv += "p_" + std::to_string(i + 1) + ",";
  csv += "support,multiplicity,depth\n";
  for (const auto& bp : result.points) {
    for (int i = 0; i < k; ++i) csv += csv_cell(bp.direction.vec()(i)) + ",";
    for (int i = 0; i < k; ++i) csv += csv_cell(bp.point(i)) + ",";
    csv += csv_cell(bp.support_value) + "," + std::to_string(bp.multiplicity) +
           "," + std::to_string(bp.depth) + "\n";
  }
  jnr::write_file_atomic(out, csv);
  for (int di : result.budget_exceeded) {
    std::cerr << "{\"warning\":\"RecursionBudgetExceeded\",\"direction_index\":"
              << di << "}\n";
  }
  return 0;
}

int run_classify(const std::string& ops_arg, double gap_tol,
                 const std::string& out) {
  const auto ops = load_operators(ops_arg);
  nlohmann::json report;
  jnr::JnrClass cls;
  if (ops.size() == 2) {
    cls = jnr::classify_k2_qutrit(ops[0], ops[1], gap_tol);
    static const char* names[] = {"oval", "one_flat_part", "two_segments",
                                  "triangle"};
    report["class"] = names[static_cast<int>(*cls.k2_label)];
    report["class_index"] = static_cast<int>(*cls.k2_label);
  } else if (ops.size() == 3) {
    cls = jnr::classify_k3_qutrit(ops[0], ops[1], ops[2], gap_tol);
    report["class"] = cls.polytope_degenerate
                          ? "polytope_degenerate"
                          : "e" + std::to_string(cls.ellipse_count) + "s" +
                                std::to_string(cls.segment_count);
  } else {
    throw jnr::InvalidArgument("classify expects 2 or 3 operators");
  }
  report["e"] = cls.ellipse_count;
  report["s"] = cls.segment_count;
  report["infinite_segments"] = cls.infinite_segments;
  report["polytope_degenerate"] = cls.polytope_degenerate;
  report["flat_part_intersections"] = cls.flat_part_intersections;
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& part : cls.flat_parts) parts.push_back(flat_part_json(part));
  report["flat_parts"] = std::move(parts);
  jnr::write_file_atomic(out, report.dump(2) + "\n");
  return 0;
}

int run_thermal(const std::string& ops_arg, const std::string& betas_arg,
                int num_directions, double gap_tol, std::uint64_t seed,
                int threads, const std::string& out) {
  const jnr::ObservableSet set(load_operators(ops_arg));
  const std::vector<double> betas = parse_betas(betas_arg);
  std::vector<jnr::Direction> directions =
      set.k() == 1
          ? jnr::default_directions(1, 2)
          : jnr::sample_directions(set.k(), num_directions,
                                   parse_strategy("auto", set.k()), seed);
  const auto points =
      jnr::thermal_range_sweep(set, betas, directions, gap_tol, threads);

  std::string csv = "beta";
  for (int i = 0; i < set.k(); ++i) csv += ",dir_" + std::to_string(i + 1);
  for (int i = 0; i < set.k(); ++i) csv += ",p_" + std::to_string(i + 1);
  csv += "\n";
  for (const auto& tp : points) {
    csv += std::isinf(tp.beta) ? "inf" : csv_cell(tp.beta);
    for (int i = 0; i < set.k(); ++i)
      csv += "," + csv_cell(tp.fake_normal.vec()(i));
    for (int i = 0; i < set.k(); ++i) csv += "," + csv_cell(tp.point(i));
    csv += "\n";
  }
  jnr::write_file_atomic(out, csv);
  return 0;
}

int run_separable(const std::string& ops_arg, const std::string& dims_arg,
                  int num_directions, int restarts, std::uint64_t seed,
                  const std::string& out) {
  const jnr::ObservableSet set(load_operators(ops_arg));
  const auto dims = split_list(dims_arg);
  if (dims.size() != 2) throw jnr::InvalidArgument("--dims expects dA,dB");
  const int dim_a = std::stoi(dims[0]);
  const int dim_b = std::stoi(dims[1]);
  std::vector<jnr::Direction> directions =
      set.k() == 1
          ? jnr::default_directions(1, 2)
          : jnr::sample_directions(set.k(), num_directions,
                                   parse_strategy("auto", set.k()), seed);
  jnr::SeesawParams params;
  params.restarts = restarts;
  params.seed = seed;
  const auto points =
      jnr::separable_boundary(set, dim_a, dim_b, directions, params);

  std::string csv;
  for (int i = 0; i < set.k(); ++i) csv += "dir_" + std::to_string(i + 1) + ",";
  for (int i = 0; i < set.k(); ++i) csv += "p_" + std::to_string(i + 1) + ",";
  csv += "value\n";
  for (const auto& bp : points) {
    for (int i = 0; i < set.k(); ++i)
      csv += csv_cell(bp.direction.vec()(i)) + ",";
    for (int i = 0; i < set.k(); ++i) csv += csv_cell(bp.point(i)) + ",";
    csv += csv_cell(bp.support_value) + "\n";
  }
  jnr::write_file_atomic(out, csv);
  return 0;
}

int run_hamiltonian(const std::string& model, int sites,
                    const std::string& out_prefix) {
  std::optional<jnr::ObservableSet> set;
  if (model == "ising") {
    set = jnr::ising_observables(sites);
  } else if (model == "xxzz") {
    set = jnr::xxzz_spin_observables(sites);
  } else if (model == "bicone") {
    set = jnr::two_qubit_examples().bicone;
  } else if (model == "ellipse-segment") {
    set = jnr::two_qubit_examples().ellipse_segment;
  } else {
    throw jnr::InvalidArgument("unknown model: " + model);
  }
  for (int i = 0; i < set->k(); ++i) {
    const std::string path = out_prefix + "_" + set->labels()[i] + ".json";
    jnr::write_operator_file(path, set->op(i));
    std::cout << path << "\n";
  }
  return 0;
}

int run_spectrum(const std::string& ops_arg, int num_thetas,
                 const std::string& out) {
  const auto ops = load_operators(ops_arg);
  if (ops.size() != 2)
    throw jnr::InvalidArgument("spectrum expects exactly two operators");
  const auto sweep = jnr::spectrum_sweep(ops[0], ops[1], num_thetas);
  std::string csv = "theta";
  for (int i = 0; i < sweep.levels.cols(); ++i)
    csv += ",level_" + std::to_string(i + 1);
  csv += ",ground_gap\n";
  for (std::size_t j = 0; j < sweep.thetas.size(); ++j) {
    csv += csv_cell(sweep.thetas[j]);
    for (int i = 0; i < sweep.levels.cols(); ++i)
      csv += "," + csv_cell(sweep.levels(j, i));
    csv += "," + csv_cell(sweep.ground_gap(j)) + "\n";
  }
  jnr::write_file_atomic(out, csv);
  return 0;
}

int run_energy_bounds(const std::string& ops_arg, const std::string& known_arg,
                      double query, double gap_tol, const std::string& out) {
  const auto ops = load_operators(ops_arg);
  if (ops.size() != 2)
    throw jnr::InvalidArgument("energy-bounds expects exactly two operators");
  std::vector<double> couplings;
  for (const std::string& item : split_list(known_arg))
    couplings.push_back(std::stod(item));
  const auto known =
      jnr::evaluate_known_energies(ops[0], ops[1], couplings, gap_tol);
  const auto bounds = jnr::energy_bounds(known, query);

  nlohmann::json j;
  j["query"] = query;
  j["lower"] = bounds.lower;
  if (std::isinf(bounds.upper))
    j["upper"] = nullptr;
  else
    j["upper"] = bounds.upper;
  nlohmann::json known_json = nlohmann::json::array();
  for (const auto& entry : known) {
    nlohmann::json e;
    e["a"] = entry.a;
    e["energy"] = entry.energy;
    if (entry.slope)
      e["slope"] = *entry.slope;
    else
      e["slope"] = nullptr;
    known_json.push_back(e);
  }
  j["known"] = std::move(known_json);
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    jnr::write_file_atomic(out, text);
  return 0;
}

int run_uncertainty(const std::string& x_path, const std::string& y_path,
                    const std::string& kind, int num_directions, double gap_tol,
                    std::uint64_t seed, const std::string& out) {
  const jnr::HermitianOperator x = jnr::parse_operator_file(x_path);
  const jnr::HermitianOperator y = jnr::parse_operator_file(y_path);
  jnr::UncertaintyProblem problem =
      kind == "product"
          ? jnr::uncertainty_lifted({x, y},
                                    jnr::UncertaintyKind::product_of_variances)
          : jnr::uncertainty_lifted({x, y},
                                    jnr::UncertaintyKind::sum_of_variances);
  const jnr::BoundBracket bracket = [&] {
    if (kind == "sum")
      return jnr::maccone_pati_bounds(x, y, num_directions, gap_tol, seed);
    if (kind == "product")
      return jnr::variance_product_bounds(x, y, num_directions, gap_tol, seed);
    throw jnr::InvalidArgument("--kind must be sum or product");
  }();
  const auto minimum = jnr::min_uncertainty_point(problem, bracket);

  nlohmann::json j;
  j["kind"] = kind;
  j["lower"] = bracket.lower;
  j["upper"] = bracket.upper;
  j["directions"] = bracket.num_directions;
  j["argmin_point"] = vector_json(bracket.argmin_point);
  j["argmin_variances"] = vector_json(minimum.variances);
  j["argmin_value"] = minimum.value;
  jnr::write_file_atomic(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint numerical range toolkit"};
  app.require_subcommand(1);

  double gap_tol = jnr::kDefaultGapTol;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--gap-tol", gap_tol,
                 "relative tolerance grouping degenerate top eigenvalues");
  app.add_option("--seed", seed, "top-level seed; subtasks derive from it");
  app.add_option("--threads", threads, "worker threads for sweeps");

  std::string ops_arg, out, strategy = "auto";
  int num_directions = 512;
  int depth = 2;

  auto* boundary = app.add_subcommand("boundary", "boundary point generation");
  boundary->add_option("--ops", ops_arg, "operator files, comma separated")
      ->required();
  boundary->add_option("--directions", num_directions, "direction count");
  boundary->add_option("--strategy", strategy,
                       "grid2d | fibonacci3d | seeded-uniform | auto");
  boundary->add_option("--depth", depth, "degenerate-face recursion depth");
  boundary->add_option("--out", out, "output CSV")->required();

  std::string betas_arg;
  auto* thermal = app.add_subcommand("thermal", "thermal range sweep");
  thermal->add_option("--ops", ops_arg, "operator files")->required();
  thermal->add_option("--betas", betas_arg, "comma list, inf allowed")
      ->required();
  thermal->add_option("--directions", num_directions, "direction count");
  thermal->add_option("--out", out, "output CSV")->required();

  auto* classify = app.add_subcommand("classify", "qutrit classification");
  classify->add_option("--ops", ops_arg, "2 or 3 operator files")->required();
  classify->add_option("--out", out, "output JSON")->required();

  std::string dims_arg = "2,2";
  int restarts = 20;
  auto* separable = app.add_subcommand("separable", "separable range sweep");
  separable->add_option("--ops", ops_arg, "operator files")->required();
  separable->add_option("--dims", dims_arg, "dA,dB bipartition")->required();
  separable->add_option("--directions", num_directions, "direction count");
  separable->add_option("--restarts", restarts, "seesaw restarts");
  separable->add_option("--out", out, "output CSV")->required();

  std::string model;
  int sites = 4;
  std::string out_prefix;
  auto* hamiltonian =
      app.add_subcommand("hamiltonian", "write model operator files");
  hamiltonian
      ->add_option("--model", model, "ising | xxzz | bicone | ellipse-segment")
      ->required();
  hamiltonian->add_option("--sites", sites, "chain length (ising, xxzz)");
  hamiltonian->add_option("--out-prefix", out_prefix, "output path prefix")
      ->required();

  int num_thetas = 360;
  auto* spectrum = app.add_subcommand("spectrum", "angular spectrum sweep");
  spectrum->add_option("--ops", ops_arg, "H0,H1 operator files")->required();
  spectrum->add_option("--num-thetas", num_thetas, "grid size");
  spectrum->add_option("--out", out, "output CSV")->required();

  std::string known_arg;
  double query = 0.0;
  auto* energy =
      app.add_subcommand("energy-bounds", "concavity bounds for the ground energy");
  energy->add_option("--ops", ops_arg, "H0,H1 operator files")->required();
  energy->add_option("--known", known_arg, "comma list of sampled couplings")
      ->required();
  energy->add_option("--query", query, "coupling to bound")->required();
  energy->add_option("--out", out, "optional output JSON (default stdout)");

  std::string x_path, y_path, kind = "sum";
  auto* uncertainty =
      app.add_subcommand("uncertainty", "variance-bound bracket");
  uncertainty->add_option("--x", x_path, "first observable")->required();
  uncertainty->add_option("--y", y_path, "second observable")->required();
  uncertainty->add_option("--kind", kind, "sum | product");
  uncertainty->add_option("--directions", num_directions, "direction count");
  uncertainty->add_option("--out", out, "output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (boundary->parsed())
      return run_boundary(ops_arg, num_directions, strategy, gap_tol, depth,
                          seed, threads, out);
    if (thermal->parsed())
      return run_thermal(ops_arg, betas_arg, num_directions, gap_tol, seed,
                         threads, out);
    if (classify->parsed()) return run_classify(ops_arg, gap_tol, out);
    if (separable->parsed())
      return run_separable(ops_arg, dims_arg, num_directions, restarts, seed,
                           out);
    if (hamiltonian->parsed()) return run_hamiltonian(model, sites, out_prefix);
    if (spectrum->parsed()) return run_spectrum(ops_arg, num_thetas, out);
    if (energy->parsed())
      return run_energy_bounds(ops_arg, known_arg, query, gap_tol, out);
    if (uncertainty->parsed())
      return run_uncertainty(x_path, y_path, kind, num_directions, gap_tol,
                             seed, out);
  } catch (const jnr::Error& e) {
    nlohmann::json diag;
    diag["error"] = e.kind();
    diag["message"] = e.what();
    std::cerr << diag.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json diag;
    diag["error"] = "Internal";
    diag["message"] = e.what();
    std::cerr << diag.dump() << "\n";
    return 1;
  }
  return 2;
}
