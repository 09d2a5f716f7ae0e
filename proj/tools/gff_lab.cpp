// gff-lab: command-line front end.
//
// Exit status: 0 all checks pass, 1 some check failed, 2 usage error,
// 3 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gfflab/acceptance.hpp"
#include "gfflab/cable.hpp"
#include "gfflab/continuum.hpp"
#include "gfflab/exact.hpp"
#include "gfflab/field.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/loewner.hpp"
#include "gfflab/loopsoup.hpp"
#include "gfflab/network.hpp"
#include "gfflab/wilson.hpp"

using namespace gfflab;
using json = nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Config {
  std::string network_file;
  std::string lattice;
  double mass = 0.0;
  int subdivide = 1;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  double sigma = 4.0;
  std::string out;
  std::string format = "csv";
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Network load_network(const Config& c) {
  if (!c.network_file.empty() && !c.lattice.empty()) throw UsageError("give either --network or --lattice, not both");
  Network net;
  if (!c.network_file.empty()) {
    std::ifstream in(c.network_file);
    if (!in) throw UsageError("cannot open network file " + c.network_file);
    net = network_from_json(json::parse(in));
  } else {
    net = lattice_from_spec(c.lattice.empty() ? "d=2,w=2,h=2" : c.lattice);
  }
  if (c.subdivide > 1) net = subdivide(net, c.subdivide);
  if (c.mass > 0.0) {
    std::vector<double> k(static_cast<std::size_t>(net.interior_count()), c.mass);
    net = add_mass(net, k);
  }
  return net;
}

// Rows of a table written as CSV or as a JSON array of objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void write(const std::string& path, const std::string& format) const {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (format == "json") {
      json doc = json::array();
      for (const auto& r : rows_) {
        json o;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
          try {
            std::size_t used = 0;
            double v = std::stod(r[i], &used);
            o[columns_[i]] = used == r[i].size() ? json(v) : json(r[i]);
          } catch (const std::exception&) {
            o[columns_[i]] = r[i];
          }
        }
        doc.push_back(o);
      }
      out << doc.dump(1) << "\n";
    } else {
      for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
      out << "\n";
      for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << "\n";
      }
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

int emit(const std::string& command, const std::vector<TestReport>& reports, const Config& c, json extra = {}) {
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  if (c.format == "json") {
    json doc{{"command", command}, {"seed", c.seed}, {"pass", ok}, {"reports", reports}};
    if (!extra.is_null()) doc["result"] = extra;
    std::cout << doc.dump(2) << "\n";
  } else {
    if (!extra.is_null()) std::cout << extra.dump() << "\n";
    for (const auto& r : reports)
      std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  statistic=" << num(r.statistic)
                << " threshold=" << num(r.threshold) << " n=" << r.sample_size << "\n";
    std::cout << command << ": " << (ok ? "all checks pass" : "FAILED") << "\n";
  }
  return ok ? 0 : 1;
}

int first_interior(const Network& net) {
  if (net.interior_count() == 0) throw UsageError("network has no interior vertices");
  return net.interior()[0];
}

int cmd_laplace(const Config& c) {
  Network net = load_network(c);
  std::vector<TestReport> reps;
  json res;
  Determinant det = det_laplacian(net);
  res["interior"] = net.interior_count();
  res["log_det_laplacian"] = det.log_value;
  if (det.value) res["det_laplacian"] = *det.value;
  TreeWeight tw = spanning_tree_weight(net);
  if (tw.tree_count) res["tree_count"] = *tw.tree_count;
  ProductIdentity pi = green_product_identity(net);
  reps.push_back(make_report("det G = product of successive diagonal Green values", pi.deviation, 1e-10, 1,
                             "det G_D = prod_j G_{D minus {x_1..x_{j-1}}}(x_j, x_j)"));
  if (net.interior_count() <= kExactLimit) {
    ExactIdentities ex = exact_identities(net);
    reps.push_back(make_report("G L = I (rational)", ex.green_inverts_laplacian ? 0 : 1, 0, 1, "G_D = (-Delta_D)^{-1}"));
    reps.push_back(make_report("det G det L = 1 (rational)", ex.det_reciprocal ? 0 : 1, 0, 1, "det G_D = 1 / det(-Delta_D)"));
    reps.push_back(make_report("product formula (rational)", ex.product_matches_det_green ? 0 : 1, 0, 1,
                               "det G_D = prod_j G_{D minus {x_1..x_{j-1}}}(x_j, x_j)"));
    res["det_laplacian_exact"] = ex.det_laplacian.str();
  }
  Eigen::MatrixXd G = green(net);
  Table t({"x", "y", "green"});
  for (int i = 0; i < G.rows(); ++i)
    for (int j = 0; j < G.cols(); ++j)
      t.add({std::to_string(net.interior()[i]), std::to_string(net.interior()[j]), num(G(i, j))});
  t.write(c.out, c.format);
  return emit("laplace", reps, c, res);
}

int cmd_field(const Config& c) {
  Network net = load_network(c);
  GffSampler sampler(net);
  std::vector<FieldSample> samples(c.replicas);
  for_each_replica(c.replicas, c.seed, [&](std::size_t r, Engine& rng) { samples[r] = sampler.sample(rng); });
  Table t({"replica", "vertex", "value"});
  for (std::size_t r = 0; r < c.replicas; ++r)
    for (int i = 0; i < net.interior_count(); ++i)
      t.add({std::to_string(r), std::to_string(net.interior()[i]), num(samples[r].values(i))});
  t.write(c.out, c.format);
  std::vector<double> k(static_cast<std::size_t>(net.interior_count()), 0.0);
  k[0] = 1.0;
  return emit("field", {verify_laplace_gff(net, k, c.replicas, stream_seed(c.seed, 1), c.sigma)}, c);
}

int cmd_wilson(const Config& c, bool continuous) {
  Network net = load_network(c);
  std::vector<WilsonResult> runs(c.replicas);
  for_each_replica(c.replicas, c.seed, [&](std::size_t r, Engine& rng) { runs[r] = wilson_ust(net, {}, rng, continuous); });
  Table t({"replica", "tree_edges"});
  for (std::size_t r = 0; r < c.replicas; ++r) {
    std::string edges;
    for (int e : runs[r].tree.edges) edges += (edges.empty() ? "" : " ") + std::to_string(e);
    t.add({std::to_string(r), edges});
  }
  t.write(c.out, c.format);
  std::vector<TestReport> reps;
  if (net.edge_count() <= 40 && net.interior_count() <= 8)
    reps.push_back(verify_tree_law(net, c.replicas, stream_seed(c.seed, 1), {}, c.sigma));
  reps.push_back(marginal_w_law(net, first_interior(net), c.replicas, stream_seed(c.seed, 2), {}, c.sigma));
  return emit("wilson", reps, c);
}

int cmd_soup(const Config& c, double alpha) {
  Network net = load_network(c);
  std::vector<SoupOccupation> occ(c.replicas);
  for_each_replica(c.replicas, c.seed, [&](std::size_t r, Engine& rng) {
    LoopSoup s = sample_soup(net, alpha, rng);
    occ[r] = occupation_fields(net, s, rng);
  });
  Table t({"replica", "vertex", "visits", "time"});
  for (std::size_t r = 0; r < c.replicas; ++r)
    for (int i = 0; i < net.interior_count(); ++i)
      t.add({std::to_string(r), std::to_string(net.interior()[i]), std::to_string(occ[r].visits[i]),
             num(occ[r].time[i])});
  t.write(c.out, c.format);
  std::vector<TestReport> reps;
  reps.push_back(empty_soup_check(net, alpha, c.replicas, stream_seed(c.seed, 1), c.sigma));
  for (auto& r : loops_through_check(net, first_interior(net), c.replicas, stream_seed(c.seed, 2), c.sigma))
    reps.push_back(r);
  std::vector<double> k(static_cast<std::size_t>(net.interior_count()), 0.5);
  reps.push_back(soup_laplace_check(net, k, alpha, c.replicas, stream_seed(c.seed, 3), c.sigma));
  return emit("soup", reps, c);
}

int cmd_cable(const Config& c, int m) {
  Network net = load_network(c);
  CableSampler sampler(net, m);
  std::vector<CableField> fields(c.replicas);
  for_each_replica(c.replicas, c.seed, [&](std::size_t r, Engine& rng) { fields[r] = sampler.sample(rng); });
  Table t({"replica", "point", "value"});
  for (std::size_t r = 0; r < c.replicas; ++r)
    for (std::size_t p = 0; p < fields[r].values.size(); ++p)
      t.add({std::to_string(r), std::to_string(p), num(fields[r].values[p])});
  t.write(c.out, c.format);
  std::vector<TestReport> reps;
  for (auto& r : midpoint_law_check(net, 0, c.replicas, stream_seed(c.seed, 1), c.sigma)) reps.push_back(r);
  for (auto& r : flip_invariance_check(net, m, first_interior(net), c.replicas, stream_seed(c.seed, 2), c.sigma))
    reps.push_back(r);
  return emit("cable", reps, c);
}

struct SleArgs {
  double kappa = 4.0;
  double T = 1.0;
  double dt = 1e-3;
  int stride = 10;
  std::string emit_path;
  bool martingale = false, side = false, depletion = false;
};

int cmd_sle(const Config& c, const SleArgs& a) {
  Engine rng = make_engine(c.seed, 0);
  DrivingFunction d = brownian_driving(a.kappa, a.T, a.dt, rng);
  TraceCurve tr = trace(d, a.stride);
  Table t({"t", "x", "y", "W"});
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::llround(tr.times[i] / d.dt));
    t.add({num(tr.times[i]), num(tr.points[i].real()), num(tr.points[i].imag()), num(d.W[k])});
  }
  t.write(a.emit_path.empty() ? c.out : a.emit_path, c.format);
  const double cap = half_plane_capacity(d);
  return emit("sle", {make_report("half-plane capacity = 2T", std::abs(cap - 2 * a.T) / (2 * a.T), 1e-6, 1,
                                  "g_t(z) = z + 2t/z + o(1/z)")},
              c, json{{"capacity", cap}, {"points", tr.points.size()}});
}

int cmd_sle_verify(const Config& c, SleArgs a) {
  if (!a.martingale && !a.side && !a.depletion) a.martingale = a.side = a.depletion = true;
  std::vector<TestReport> reps;
  using Complex = std::complex<double>;
  const std::vector<Complex> zs = {Complex(0, 1), std::polar(1.0, 2 * std::numbers::pi / 3),
                                   std::polar(1.0, std::numbers::pi / 6)};
  if (a.martingale)
    for (auto& r : sle_angle_martingale(4.0, c.replicas, zs, {0.25, 0.5, 1.0}, a.dt, stream_seed(c.seed, 1), c.sigma))
      reps.push_back(r);
  if (a.side) {
    std::uint64_t s = 2;
    for (Complex z : zs) reps.push_back(side_probability(c.replicas, z, SideOptions{}, stream_seed(c.seed, s++), c.sigma).report);
  }
  if (a.depletion) {
    Engine rng = make_engine(c.seed, 9);
    DepletionResult dep = green_depletion_check(brownian_driving(4.0, 0.25, 1e-4, rng), BumpFunction{}, 8);
    auto r = make_report("Green depletion identity", dep.deviation, 1e-2, 1,
                         "d/dt G_{H minus eta(0,t]}(x, y) = -(1/2pi) I_t(x) I_t(y)");
    r.detail["lhs"] = dep.lhs;
    r.detail["rhs"] = dep.rhs;
    reps.push_back(r);
  }
  return emit("sle verify", reps, c);
}

std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
      for (int n = a; n <= b; ++n) out.push_back(n);
    } else {
      std::stringstream ss(s);
      std::string part;
      while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
    }
  } catch (const std::exception&) {
    throw UsageError("bad --levels '" + s + "' (expected a..b or a,b,c)");
  }
  if (out.empty()) throw UsageError("empty --levels");
  for (int n : out)
    if (n < 0 || n > 8) throw UsageError("levels must lie in 0..8");
  return out;
}

int cmd_lqg(const Config& c, const std::vector<double>& gammas, const std::string& levels, double threshold) {
  auto lv = parse_levels(levels);
  LqgReport rep = lqg_report(gammas, lv, c.replicas, c.seed, c.sigma, threshold);
  Table t({"gamma", "level", "replica", "total"});
  for (std::size_t g = 0; g < gammas.size(); ++g)
    for (std::size_t l = 0; l < lv.size(); ++l)
      for (std::size_t r = 0; r < c.replicas; ++r)
        t.add({num(gammas[g]), std::to_string(lv[l]), std::to_string(r), num(rep.totals[g][l][r])});
  t.write(c.out, c.format);
  return emit("lqg", rep.reports, c);
}

int cmd_continuum_verify(const Config& c, int M) {
  using Complex = std::complex<double>;
  std::vector<TestReport> reps;
  auto lin = circle_log_linearity(512, Complex(0.5, 0.5), {0.25, 0.125, 0.0625, 0.03125, 0.015625});
  reps.push_back(lin.report);
  for (auto& r : brownian_structure_check(M, Complex(0.25, 0.5), Complex(0.75, 0.5), {0.2, 0.1, 0.05, 0.025},
                                          c.replicas, c.seed, c.sigma))
    reps.push_back(r);
  return emit("continuum verify", reps, c, json{{"increment_constant", lin.mean_constant}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gff-lab: Gaussian free field, loop-soup and SLE_4 laboratory"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--network", cfg.network_file, "network JSON file");
  app.add_option("--lattice", cfg.lattice, "lattice box, e.g. d=2,w=2,h=2 or sides=3x3");
  app.add_option("--mass-const", cfg.mass, "constant killing rate k on every interior vertex")->check(CLI::NonNegativeNumber);
  app.add_option("--subdivide", cfg.subdivide, "subdivide every edge into m pieces")->check(CLI::PositiveNumber);
  app.add_option("--replicas", cfg.replicas, "number of replicas")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--sigma", cfg.sigma, "sigma multiplier of the statistical tests")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "sample output file");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* laplace = app.add_subcommand("laplace", "Green's function, determinants, exact identities")->fallthrough();
  auto* field = app.add_subcommand("field", "sample the discrete GFF")->fallthrough();
  bool discrete = false;
  auto* wilson = app.add_subcommand("wilson", "uniform spanning trees by Wilson's algorithm")->fallthrough();
  wilson->add_flag("--discrete", discrete, "discrete-time walks (no holding times)");
  double alpha = 0.5;
  auto* soup = app.add_subcommand("soup", "random-walk loop soups")->fallthrough();
  soup->add_option("--alpha", alpha, "intensity")->check(CLI::PositiveNumber);
  int segments = 2;
  auto* cable = app.add_subcommand("cable", "cable-graph GFF")->fallthrough();
  cable->add_option("--segments", segments, "sample points per edge")->check(CLI::PositiveNumber);

  SleArgs sle_args;
  auto* sle = app.add_subcommand("sle", "Loewner chains driven by sqrt(kappa) B")->fallthrough();
  sle->add_option("--kappa", sle_args.kappa)->check(CLI::NonNegativeNumber);
  sle->add_option("--T", sle_args.T)->check(CLI::PositiveNumber);
  sle->add_option("--dt", sle_args.dt)->check(CLI::PositiveNumber);
  sle->add_option("--stride", sle_args.stride)->check(CLI::PositiveNumber);
  sle->add_option("--emit", sle_args.emit_path, "trace CSV");
  auto* sle_verify = sle->add_subcommand("verify", "SLE_4 martingale, side probabilities, Green depletion")->fallthrough();
  sle_verify->add_flag("--martingale", sle_args.martingale);
  sle_verify->add_flag("--side-prob", sle_args.side);
  sle_verify->add_flag("--depletion", sle_args.depletion);

  std::vector<double> gammas = {1.0};
  std::string levels = "4..8";
  double threshold = AcceptanceOptions{}.degeneracy_threshold;
  auto* lqg = app.add_subcommand("lqg", "LQG measure from circle averages")->fallthrough();
  lqg->add_option("--gamma", gammas, "gamma values")->delimiter(',');
  lqg->add_option("--levels", levels, "dyadic levels, a..b or a,b,c");
  lqg->add_option("--degeneracy-threshold", threshold);

  int cutoff = 128;
  auto* continuum = app.add_subcommand("continuum", "continuum GFF on the unit square")->fallthrough();
  auto* cont_verify = continuum->add_subcommand("verify", "circle-average checks")->fallthrough();
  bool circle_bm = false;
  cont_verify->add_flag("--circle-bm", circle_bm, "Brownian structure of circle averages");
  cont_verify->add_option("--modes", cutoff)->check(CLI::PositiveNumber);
  continuum->require_subcommand(1);

  AcceptanceOptions acc;
  std::vector<int> criteria;
  auto* verify_all = app.add_subcommand("verify-all", "acceptance suite")->fallthrough();
  verify_all->add_option("--scale", acc.scale)->check(CLI::IsMember({"ci", "smoke"}));
  verify_all->add_option("--criteria", criteria)->delimiter(',')->check(CLI::Range(1, kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*laplace) return cmd_laplace(cfg);
    if (*field) return cmd_field(cfg);
    if (*wilson) return cmd_wilson(cfg, !discrete);
    if (*soup) return cmd_soup(cfg, alpha);
    if (*cable) return cmd_cable(cfg, segments);
    if (*sle_verify) return cmd_sle_verify(cfg, sle_args);
    if (*sle) return cmd_sle(cfg, sle_args);
    if (*lqg) return cmd_lqg(cfg, gammas, levels, threshold);
    if (*cont_verify) return cmd_continuum_verify(cfg, cutoff);
    if (*verify_all) {
      if (app.count("--seed") > 0) acc.seed = cfg.seed;
      acc.sigma = cfg.sigma;
      bool all = true;
      json doc = json::array();
      run_acceptance(acc, criteria, [&](const Criterion& cr) {
        std::cout << summary_line(cr) << std::endl;
        all = all && cr.pass();
        doc.push_back({{"criterion", cr.id}, {"title", cr.title}, {"pass", cr.pass()}, {"reports", cr.reports}});
      });
      if (!cfg.out.empty()) std::ofstream(cfg.out) << doc.dump(2) << "\n";
      std::cout << "verify-all: " << (all ? "all criteria pass" : "FAILED") << "\n";
      return all ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "gff-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gff-lab: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
