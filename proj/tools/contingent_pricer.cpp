// Command-line front end: market diagnosis, tree pricing, contract
// valuation along both routes, premium solving, and a self-check
// suite. All numeric output goes through %.17g so reruns are
// byte-identical.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "ftap/errors.hpp"
#include "ftap/linalg.hpp"
#include "ftap/market.hpp"
#include "ftap/mortality.hpp"
#include "ftap/tree.hpp"
#include "ftap/valuation.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

enum class LogLevel { debug = 0, info = 1, warn = 2, off = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("CONTINGENT_PRICER_LOG");
    if (!env) return LogLevel::warn;
    const std::string v = env;
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    if (v == "warn") return LogLevel::warn;
    if (v == "off" || v == "none") return LogLevel::off;
    return LogLevel::warn;
  }();
  return level;
}

void log_at(LogLevel lvl, const char* tag, const std::string& msg) {
  if (lvl >= log_level()) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}
void log_debug(const std::string& msg) { log_at(LogLevel::debug, "debug", msg); }
void log_info(const std::string& msg) { log_at(LogLevel::info, "info", msg); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Numbers are emitted as preformatted %.17g strings rather than
// through the library's own serializer, keeping every digit stable.
json jnum_str(double v) { return json(fmt(v)); }

json jarray(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(fmt(v));
  return arr;
}

void emit(const json& doc) { std::printf("%s\n", doc.dump(2).c_str()); }

// Write through a sibling temp file and rename so readers never see a
// half-written table.
void write_atomically(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write output file: " + tmp);
    out << body;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::invalid_argument("cannot move output into place: " + path);
}

int run_check_market(const std::string& input, double tolerance, const std::string& format) {
  const ftap::PayoffMatrix market = ftap::load_payoff_csv(input);
  log_info("market: " + std::to_string(market.assets()) + " assets, " +
           std::to_string(market.states()) + " states");
  const ftap::MarketDiagnosis diag = ftap::detect_arbitrage(market, tolerance);

  if (std::holds_alternative<ftap::ArbitrageCertificate>(diag)) {
    const auto& cert = std::get<ftap::ArbitrageCertificate>(diag);
    if (format == "csv") {
      std::printf("asset,weight\n");
      for (std::size_t i = 0; i < cert.weights.size(); ++i)
        std::printf("%s,%s\n", market.asset_ids[i].c_str(), fmt(cert.weights[i]).c_str());
    } else {
      json doc;
      doc["outcome"] = "arbitrage";
      doc["weights"] = jarray(cert.weights);
      doc["cost"] = jnum_str(cert.cost);
      doc["state_payoffs"] = jarray(cert.state_payoffs);
      emit(doc);
    }
    return 2;
  }

  const auto& sdf = std::get<ftap::SdfVector>(diag);
  const ftap::SdfSolution solved = ftap::solve_sdf(market, tolerance);
  if (format == "csv") {
    std::printf("state,deflator\n");
    for (std::size_t k = 0; k < sdf.values().size(); ++k)
      std::printf("%zu,%s\n", k + 1, fmt(sdf.values()[k]).c_str());
  } else {
    json doc;
    doc["outcome"] = "sdf";
    doc["sdf"] = jarray(sdf.values());
    doc["complete_market"] = solved.unique;
    doc["residual"] = jnum_str(solved.residual);
    if (market.has_risk_free) {
      const ftap::RiskNeutralMeasure rn =
          ftap::extract_risk_neutral(sdf, market.risk_free_rate, tolerance);
      doc["risk_neutral"]["discount"] = jnum_str(rn.discount);
      doc["risk_neutral"]["probabilities"] = jarray(rn.probabilities);
    }
    emit(doc);
  }
  return 0;
}

int run_price_tree(const std::string& input, const std::string& format,
                   const std::string& output) {
  const ftap::UncertaintyTree tree = ftap::load_tree_json(input);
  log_info("tree: " + std::to_string(tree.nodes().size()) + " nodes, horizon " +
           std::to_string(tree.horizon()));
  const std::vector<double> kernel = ftap::compute_pricing_kernel(tree);
  const std::vector<double> prices = ftap::price_backward_induction(tree);
  const double lottery_root = ftap::price_reduced_lottery(tree, tree.root());
  const ftap::MartingaleReport mart = ftap::check_martingale(tree, prices);

  std::string csv = "id,time,price,kernel\n";
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    csv += tree.node(i).id + "," + std::to_string(tree.node(i).time) + "," + fmt(prices[i]) +
           "," + fmt(kernel[i]) + "\n";
  }
  if (!output.empty()) write_atomically(output, csv);

  if (format == "csv") {
    if (output.empty()) std::fputs(csv.c_str(), stdout);
  } else {
    json doc;
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
      json rec;
      rec["id"] = tree.node(i).id;
      rec["time"] = tree.node(i).time;
      rec["price"] = jnum_str(prices[i]);
      rec["kernel"] = jnum_str(kernel[i]);
      nodes.push_back(std::move(rec));
    }
    doc["nodes"] = std::move(nodes);
    doc["root_price"] = jnum_str(prices[tree.root()]);
    doc["root_reduced_lottery"] = jnum_str(lottery_root);
    doc["martingale"]["holds"] = mart.is_martingale;
    doc["martingale"]["max_abs_residual"] = jnum_str(mart.max_abs_residual);
    doc["martingale"]["threshold"] = jnum_str(mart.threshold);
    emit(doc);
  }

  const double gap = std::abs(prices[tree.root()] - lottery_root);
  if (gap > 1e-9 * (1.0 + std::abs(prices[tree.root()]))) {
    std::fprintf(stderr, "error: reduced-lottery cross-check off by %s\n", fmt(gap).c_str());
    return 1;
  }
  return 0;
}

ftap::ValuationResult value_by(const ftap::ValuationRequest& req, ftap::ValuationMethod method,
                               double grid_step) {
  using ftap::ContractKind;
  if (method == ftap::ValuationMethod::quadrature) {
    ftap::ValuationRequest q = req;
    q.grid_step = grid_step;
    switch (req.contract.kind) {
      case ContractKind::risk_free:
        return ftap::value_risk_free(q);
      case ContractKind::whole_life:
        return ftap::value_whole_life_quadrature(q);
      case ContractKind::continuous_annuity:
        return ftap::value_annuity_quadrature(q);
    }
  }
  switch (req.contract.kind) {
    case ContractKind::risk_free:
      return ftap::value_risk_free_ode(req, grid_step);
    case ContractKind::whole_life:
      return ftap::value_whole_life_ode(req, grid_step);
    case ContractKind::continuous_annuity:
      return ftap::value_annuity_ode(req, grid_step);
  }
  throw std::logic_error("unreachable contract kind");
}

int run_value(const std::string& input, double grid_step_override, double tolerance,
              const std::string& output) {
  ftap::ValuationRequest req = ftap::load_valuation_request(input);
  const double step = grid_step_override > 0.0 ? grid_step_override : req.grid_step;
  log_info("valuing to horizon " + fmt(ftap::resolved_horizon(req)) + " at step " + fmt(step));

  const ftap::ValuationResult quad = value_by(req, ftap::ValuationMethod::quadrature, step);
  const ftap::ValuationResult ode = value_by(req, ftap::ValuationMethod::ode, step);

  double deviation = 0.0;
  for (std::size_t i = 0; i < quad.prices().size(); ++i)
    deviation = std::max(deviation, std::abs(quad.prices()[i] - ode.prices()[i]));

  if (!output.empty()) {
    std::string csv = "t,price_quadrature,price_ode\n";
    for (std::size_t i = 0; i < quad.times().size(); ++i)
      csv += fmt(quad.times()[i]) + "," + fmt(quad.prices()[i]) + "," + fmt(ode.prices()[i]) +
             "\n";
    write_atomically(output, csv);
    log_debug("price table written to " + output);
  }

  json doc;
  doc["horizon"] = jnum_str(quad.horizon());
  doc["grid_step"] = jnum_str(quad.grid_step());
  doc["price_zero"]["quadrature"] = jnum_str(quad.price_zero());
  doc["price_zero"]["ode"] = jnum_str(ode.price_zero());
  doc["max_deviation"] = jnum_str(deviation);
  doc["work"]["quadrature_panels"] = quad.work();
  doc["work"]["ode_steps"] = ode.work();
  emit(doc);

  if (deviation > tolerance) {
    std::fprintf(stderr, "error: methods disagree by %s (tolerance %s)\n", fmt(deviation).c_str(),
                 fmt(tolerance).c_str());
    return 3;
  }
  return 0;
}

int run_premium(const std::string& input) {
  const ftap::ValuationRequest req = ftap::load_valuation_request(input);
  if (req.contract.kind != ftap::ContractKind::whole_life)
    throw std::invalid_argument("premium needs a whole_life contract");
  if (!req.survival) throw std::invalid_argument("premium needs a mortality block");
  const double delta = req.foi.constant_value();

  const double a = ftap::A_bar(*req.survival, req.issue_age, delta);
  const double ann = ftap::a_bar(*req.survival, req.issue_age, delta);
  const double rho =
      ftap::solve_net_premium_rate(*req.survival, req.issue_age, delta, req.contract.benefit);

  json doc;
  doc["issue_age"] = jnum_str(req.issue_age);
  doc["delta"] = jnum_str(delta);
  doc["insurance_epv_unit"] = jnum_str(a);
  doc["annuity_epv_unit"] = jnum_str(ann);
  doc["premium_rate"] = jnum_str(rho);
  emit(doc);
  return 0;
}

// Deterministic self-checks over randomized fixtures. Each suite
// prints one verdict line; the command fails if any suite does.
struct SuiteOutcome {
  bool ok = true;
  std::string detail;
};

SuiteOutcome suite_farkas_dichotomy(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_real_distribution<double> cost(-1.0, 2.0);
  int arb = 0;
  int sdf = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t m = dim(rng);
    const std::size_t n = dim(rng);
    ftap::Matrix payoffs(m, n, 0.0);
    std::vector<double> costs(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < n; ++k) payoffs(i, k) = entry(rng);
      costs[i] = cost(rng);
    }
    const ftap::PayoffMatrix market = ftap::make_market(std::move(payoffs), std::move(costs));
    const ftap::MarketDiagnosis diag = ftap::detect_arbitrage(market);
    if (std::holds_alternative<ftap::SdfVector>(diag)) {
      ++sdf;
      const auto& v = std::get<ftap::SdfVector>(diag).values();
      for (double c : v)
        if (!(c > 0.0)) return {false, "non-positive deflator component"};
      double residual = 0.0;
      const std::vector<double> priced = ftap::mat_vec(market.payoffs, v);
      for (std::size_t i = 0; i < market.assets(); ++i)
        residual = std::max(residual, std::abs(priced[i] - market.costs[i]));
      if (residual > 1e-7) return {false, "pricing residual " + fmt(residual)};
    } else {
      ++arb;
      const auto& cert = std::get<ftap::ArbitrageCertificate>(diag);
      if (cert.cost > 1e-7) return {false, "certificate has positive cost"};
      double best = 0.0;
      for (double p : cert.state_payoffs) {
        if (p < -1e-7) return {false, "certificate pays negative in a state"};
        best = std::max(best, p);
      }
      if (!(cert.cost < -1e-7 || best > 1e-7)) return {false, "certificate is not strict"};
    }
  }
  if (arb == 0 || sdf == 0) return {false, "one branch of the dichotomy never occurred"};
  return {true, std::to_string(sdf) + " deflators, " + std::to_string(arb) + " arbitrages"};
}

ftap::UncertaintyTree random_tree(std::mt19937& rng, double injected_dividend) {
  std::uniform_int_distribution<int> depth_dist(2, 4);
  std::uniform_int_distribution<int> branch_dist(1, 3);
  std::uniform_real_distribution<double> sdf_dist(0.3, 1.2);
  std::uniform_real_distribution<double> price_dist(0.0, 5.0);
  std::uniform_real_distribution<double> raw_prob(0.05, 1.0);

  const int depth = depth_dist(rng);
  std::vector<ftap::TreeNode> nodes(1);
  nodes[0].id = "n0";
  std::vector<std::size_t> frontier = {0};
  for (int t = 1; t <= depth; ++t) {
    std::vector<std::size_t> next;
    for (std::size_t parent : frontier) {
      const int kids = branch_dist(rng);
      std::vector<double> probs(static_cast<std::size_t>(kids));
      double total = 0.0;
      for (double& p : probs) total += (p = raw_prob(rng));
      for (int c = 0; c < kids; ++c) {
        ftap::TreeNode node;
        node.id = "n" + std::to_string(nodes.size());
        node.time = t;
        node.parent = static_cast<std::int64_t>(parent);
        node.branch_probability = probs[static_cast<std::size_t>(c)] / total;
        node.sdf_step = sdf_dist(rng);
        if (t == depth) node.price = price_dist(rng);
        next.push_back(nodes.size());
        nodes.push_back(std::move(node));
      }
    }
    frontier = std::move(next);
  }
  if (injected_dividend != 0.0) nodes[1].dividend = injected_dividend;
  return ftap::UncertaintyTree::build(std::move(nodes));
}

SuiteOutcome suite_tower_property(std::mt19937& rng) {
  for (int trial = 0; trial < 60; ++trial) {
    const ftap::UncertaintyTree tree = random_tree(rng, 0.0);
    const std::vector<double> prices = ftap::price_backward_induction(tree);
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
      const double direct = ftap::price_reduced_lottery(tree, i);
      if (std::abs(direct - prices[i]) > 1e-9 * (1.0 + std::abs(prices[i])))
        return {false, "one-shot and recursive prices split at node " + tree.node(i).id};
    }
  }
  return {true, "60 trees"};
}

SuiteOutcome suite_martingale(std::mt19937& rng, double injected_dividend) {
  for (int trial = 0; trial < 60; ++trial) {
    const ftap::UncertaintyTree tree = random_tree(rng, injected_dividend);
    const std::vector<double> prices = ftap::price_backward_induction(tree);
    const ftap::MartingaleReport report = ftap::check_martingale(tree, prices);
    if (!report.is_martingale)
      return {false, "deflated prices drift by " + fmt(report.max_abs_residual)};
  }
  return {true, "60 dividend-free trees"};
}

SuiteOutcome suite_epv_identity() {
  const ftap::SurvivalModel models[] = {
      ftap::SurvivalModel::constant_force(0.04),
      ftap::SurvivalModel::de_moivre(100.0),
      ftap::SurvivalModel::gompertz(0.0003, 1.07),
  };
  for (const ftap::SurvivalModel& m : models) {
    for (double delta : {0.0, 0.02, 0.06}) {
      const double lhs = ftap::A_bar(m, 30.0, delta) + delta * ftap::a_bar(m, 30.0, delta);
      if (std::abs(lhs - 1.0) > 1e-8)
        return {false, "identity misses 1 by " + fmt(std::abs(lhs - 1.0))};
    }
  }
  return {true, "3 laws x 3 rates"};
}

SuiteOutcome suite_ode_vs_quadrature(double agreement_tol) {
  ftap::ValuationRequest wl;
  wl.contract = ftap::Contract::whole_life(ftap::TimeFunction::constant(1.0));
  wl.foi = ftap::ForceOfInterest::constant(0.06);
  wl.survival = ftap::SurvivalModel::constant_force(0.04);
  wl.issue_age = 30.0;

  ftap::ValuationRequest ann;
  ann.contract = ftap::Contract::continuous_annuity(ftap::TimeFunction::constant(1.0));
  ann.foi = ftap::ForceOfInterest::constant(0.05);
  ann.survival = ftap::SurvivalModel::de_moivre(80.0);
  ann.issue_age = 40.0;

  for (const ftap::ValuationRequest& req : {wl, ann}) {
    const ftap::ValuationResult ode = value_by(req, ftap::ValuationMethod::ode, 1.0 / 256.0);
    if (ode.method_agreement() > agreement_tol)
      return {false, "routes disagree by " + fmt(ode.method_agreement())};
  }
  return {true, "2 contracts at step 1/256"};
}

SuiteOutcome suite_recursion() {
  ftap::ValuationRequest req;
  req.contract = ftap::Contract::whole_life(ftap::TimeFunction::constant(1.0));
  req.foi = ftap::ForceOfInterest::constant(0.05);
  req.survival = ftap::SurvivalModel::de_moivre(90.0);
  req.issue_age = 50.0;
  const ftap::ValuationResult quad = value_by(req, ftap::ValuationMethod::quadrature, 1.0 / 64.0);
  for (const auto& [a, b, c] : {std::tuple{1.0, 5.0, 11.0}, {0.25, 17.5, 30.0}}) {
    const double residual = ftap::check_recursion(quad, a, b, c);
    if (residual > 1e-8) return {false, "recursion residual " + fmt(residual)};
  }
  return {true, "2 date triples"};
}

int run_verify(unsigned seed, bool inject_dividend, double agreement_tol) {
  std::mt19937 rng(seed);
  bool all_ok = true;
  const auto report = [&all_ok](const char* name, const SuiteOutcome& out) {
    std::printf("[%s] %s%s%s\n", out.ok ? "pass" : "FAIL", name, out.detail.empty() ? "" : ": ",
                out.detail.c_str());
    all_ok = all_ok && out.ok;
  };
  report("farkas_dichotomy", suite_farkas_dichotomy(rng));
  report("tower_property", suite_tower_property(rng));
  report("martingale_zero_dividend", suite_martingale(rng, inject_dividend ? 1.0 : 0.0));
  report("epv_identity", suite_epv_identity());
  report("ode_vs_quadrature", suite_ode_vs_quadrature(agreement_tol));
  report("recursion", suite_recursion());
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrage detection and contingent-claim valuation"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string format = "json";
  double tolerance = 1e-9;
  double grid_step = 0.0;
  unsigned seed = 20240817;
  bool inject_dividend = false;
  double agreement_tol = 1e-6;

  CLI::App* check = app.add_subcommand("check-market", "Classify a one-step market");
  check->add_option("--input", input, "payoff csv")->required();
  check->add_option("--tolerance", tolerance, "feasibility tolerance");
  check->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* price = app.add_subcommand("price-tree", "Price a leveled uncertainty tree");
  price->add_option("--input", input, "tree json")->required();
  price->add_option("--output", output, "write node prices as csv");
  price->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* value = app.add_subcommand("value", "Value a contract along both routes");
  value->add_option("--input", input, "valuation config json")->required();
  value->add_option("--grid-step", grid_step, "override the config grid step");
  double value_tol = 1e-6;
  value->add_option("--tolerance", value_tol, "allowed route disagreement");
  value->add_option("--output", output, "write the price path as csv");

  CLI::App* premium = app.add_subcommand("premium", "Equivalence-principle premium rate");
  premium->add_option("--input", input, "whole-life valuation config json")->required();

  CLI::App* verify = app.add_subcommand("verify", "Run the self-check suites");
  verify->add_option("--seed", seed, "rng seed for the randomized suites");
  verify->add_flag("--inject-dividend", inject_dividend,
                   "negative control: plant an interim dividend");
  verify->add_option("--ode-agreement-tol", agreement_tol, "route agreement threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_check_market(input, tolerance, format);
    if (price->parsed()) return run_price_tree(input, format, output);
    if (value->parsed()) return run_value(input, grid_step, value_tol, output);
    if (premium->parsed()) return run_premium(input);
    if (verify->parsed()) return run_verify(seed, inject_dividend, agreement_tol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
