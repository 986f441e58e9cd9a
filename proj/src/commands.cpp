#include "bregman/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bregman/checks.hpp"
#include "bregman/dre.hpp"
#include "bregman/errors.hpp"
#include "bregman/experiments.hpp"
#include "bregman/generators.hpp"
#include "bregman/iw.hpp"
#include "bregman/losses.hpp"
#include "bregman/synth.hpp"

namespace bregman {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json pair_defaults() {
  PiecewisePairSpec d = default_piecewise_pair();
  return {{"lo", d.lo},
          {"hi", d.hi},
          {"breakpoints", d.breakpoints},
          {"p_levels", json::array({8.0, 0.3, 0.05, 0.3, 9.0})},
          {"q_levels", json::array({1.0, 1.0, 1.0, 1.0, 1.0})}};
}

json gaussian_defaults() {
  return {{"mu_p", 1.0}, {"sigma_p", 0.5}, {"mu_q", 0.0}, {"sigma_q", 1.0}};
}

bool same_kind(const json& def, const json& v) {
  if (def.is_null()) return v.is_null() || v.is_number();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) {
    return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  }
  return def.type() == v.type();
}

double num(const RunConfig& c, const char* key) {
  const json& v = c.values.at(key);
  if (v.is_null()) return std::nan("");
  return v.get<double>();
}

int integer(const RunConfig& c, const char* key) {
  double v = num(c, key);
  if (v != std::floor(v) || v < 0) throw UsageError(std::string("config: '") + key + "' must be a nonnegative integer");
  return static_cast<int>(v);
}

std::string str(const RunConfig& c, const char* key) { return c.values.at(key).get<std::string>(); }

std::vector<double> vec(const RunConfig& c, const char* key) {
  return c.values.at(key).get<std::vector<double>>();
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw UsageError("cannot write " + path.string());
    row_strings(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(fmt_num(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

PiecewisePairSpec pair_from(const RunConfig& c) {
  std::vector<double> q = vec(c, "q_levels");
  return PiecewisePairSpec::normalized(num(c, "lo"), num(c, "hi"), vec(c, "breakpoints"),
                                       vec(c, "p_levels"), q);
}

GaussianPair gaussian_from(const RunConfig& c) {
  return gaussian_pair(num(c, "mu_p"), num(c, "sigma_p"), num(c, "mu_q"), num(c, "sigma_q"));
}

CompositeLoss loss_from(const std::string& family, double k) {
  if (!is_known_family(family)) throw UsageError("unknown family '" + family + "'");
  return make_family_loss(family, k);
}

json kernel_json(const KernelSpec& k) {
  if (k.kind == KernelSpec::Kind::gaussian) return {{"kind", "gaussian"}, {"sigma", k.sigma}};
  return {{"kind", "polynomial"}, {"degree", k.degree}, {"offset", k.offset}};
}

KernelSpec kernel_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return KernelSpec::gaussian(j.at("sigma").get<double>());
  if (kind == "polynomial") return KernelSpec::polynomial(j.at("degree").get<int>(), j.value("offset", 1.0));
  throw UsageError("model: unknown kernel kind '" + kind + "'");
}

Points read_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::exception&) {
        r.clear();
        break;
      }
    }
    if (r.empty()) {
      if (rows.empty()) continue;  // header line
      throw UsageError("malformed row in " + path.string() + ": " + line);
    }
    if (!rows.empty() && r.size() != rows[0].size()) throw UsageError("inconsistent columns in " + path.string());
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw UsageError("no points in " + path.string());
  Points X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) X(i, j) = rows[i][j];
  }
  return X;
}

json points_json(const Points& X) {
  json a = json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < X.cols(); ++j) r.push_back(X(i, j));
    a.push_back(r);
  }
  return a;
}

}  // namespace

json command_defaults(const std::string& command) {
  json d = {{"seed", 0}, {"out", "out"}};
  if (command == "loss-show") {
    d.update({{"family", "kulsif"}, {"k", 0.0}, {"c1", 0.0}, {"c2", 0.0}, {"rows", 101},
              {"yhat_min", nullptr}, {"yhat_max", nullptr}});
  } else if (command == "fit") {
    d.update(gaussian_defaults());
    d.update({{"family", "ew"}, {"k", 0.0}, {"alpha", "cv"},
              {"cv_grid", json::array({10.0, 0.1, 1e-3})}, {"cv_folds", 5},
              {"kernel", "gaussian"}, {"sigma", 0.0}, {"degree", 5}, {"offset", 1.0},
              {"data", "gaussian"}, {"n_p", 100}, {"n_q", 100}, {"p_csv", ""}, {"q_csv", ""},
              {"max_iter", 100}, {"grad_tol", 1e-8}, {"n_eval", 1000}});
  } else if (command == "eval") {
    d.update({{"model", "model.json"}, {"points", "points.csv"}});
  } else if (command == "fig1") {
    d.update(pair_defaults());
    d.update({{"quad_nodes", 2001}, {"grid_points", 401}, {"sup_lo", 0.9}, {"sup_hi", 1.0}});
  } else if (command == "fig2") {
    d.update(gaussian_defaults());
    d.update({{"sizes", json::array({10, 100})}, {"alphas", json::array({1e-6, 1e-4, 1e-2, 1.0})},
              {"grid_lo", -3.0}, {"grid_hi", 3.0}, {"grid_points", 121}, {"max_iter", 100}});
  } else if (command == "fig3") {
    d.update(pair_defaults());
    d.update({{"n_src", 200}, {"n_tgt", 200}, {"noise", 0.1}, {"alpha", 1e-32}, {"degree", 5},
              {"offset", 1.0}, {"quad_nodes", 2001}, {"l2_nodes", 10001}, {"grid_points", 401}});
  } else if (command == "check") {
    // seed and out only
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  return d;
}

RunConfig make_config(const std::string& command, const json& file_values, const json& overrides) {
  json defaults = command_defaults(command);
  json values = defaults;
  for (const json* src : {&file_values, &overrides}) {
    if (src->is_null()) continue;
    if (!src->is_object()) throw UsageError("config must be a flat JSON object");
    for (auto it = src->begin(); it != src->end(); ++it) {
      if (!defaults.contains(it.key())) {
        throw UsageError("config: unknown key '" + it.key() + "' for command " + command);
      }
      const json& def = defaults[it.key()];
      bool ok = same_kind(def, it.value());
      if (command == "fit" && it.key() == "alpha") {
        ok = it.value().is_number() || (it.value().is_string() && it.value() == "cv");
      }
      if (!ok) throw UsageError("config: wrong type for '" + it.key() + "'");
      values[it.key()] = it.value();
    }
  }
  RunConfig cfg;
  cfg.command = command;
  cfg.values = values;
  const json& seed = values["seed"];
  if (!seed.is_number_integer() && !(seed.is_number() && seed.get<double>() == std::floor(seed.get<double>()))) {
    throw UsageError("config: seed must be an integer");
  }
  cfg.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                       : static_cast<std::uint64_t>(seed.get<double>());
  cfg.out_dir = values["out"].get<std::string>();
  return cfg;
}

void cmd_loss_show(const RunConfig& cfg) {
  std::string family = str(cfg, "family");
  double k = num(cfg, "k");
  CompositeLoss base = loss_from(family, k);
  CompositeLoss loss(base.generator(), base.ratio_map(), num(cfg, "c1"), num(cfg, "c2"));
  const BregmanGenerator& gen = loss.generator();
  const RatioMap& m = loss.ratio_map();
  double lo = num(cfg, "yhat_min"), hi = num(cfg, "yhat_max");
  if (std::isnan(lo)) lo = m.g_inv(gen.positive_domain ? 0.01 : 0.0);
  if (std::isnan(hi)) hi = m.g_inv(10.0);
  int rows = integer(cfg, "rows");
  if (rows < 2 || !(lo < hi)) throw UsageError("loss-show: need rows >= 2 and yhat_min < yhat_max");

  fs::path out = prepare_out(cfg);
  CsvWriter csv(out / "loss.csv",
                {"yhat", "ell_pos", "ell_neg", "inv_link", "g", "slack_lower", "slack_upper"});
  for (int i = 0; i < rows; ++i) {
    double s = (i == rows - 1) ? hi : lo + (hi - lo) * i / (rows - 1);
    double x = m.g(loss.clamp_score(s));
    ConvexitySlack sl = convexity_margin(gen, m, std::max(x, gen.domain_eps));
    csv.row({s, loss.ell_pos(s), loss.ell_neg(s), loss.inv_link(s), x, sl.lower, sl.upper});
  }
  write_json(out / "loss.json", {{"family", family},
                                 {"k", k},
                                 {"c1", loss.c1()},
                                 {"c2", loss.c2()},
                                 {"ratio_map", m.name},
                                 {"score_lo", loss.score_lo()},
                                 {"score_hi", loss.score_hi()}});
}

void cmd_fit(const RunConfig& cfg) {
  std::string family = str(cfg, "family");
  double k = num(cfg, "k");
  CompositeLoss loss = loss_from(family, k);
  Rng root(cfg.seed);

  SampleSet samples;
  bool synthetic = str(cfg, "data") == "gaussian";
  GaussianPair gp;
  if (synthetic) {
    gp = gaussian_from(cfg);
    Rng sp = root.substream("fit-p"), sq = root.substream("fit-q");
    samples.xs_p = column_points(gp.sample(Which::P, integer(cfg, "n_p"), sp));
    samples.xs_q = column_points(gp.sample(Which::Q, integer(cfg, "n_q"), sq));
  } else if (str(cfg, "data") == "csv") {
    samples.xs_p = read_points_csv(str(cfg, "p_csv"));
    samples.xs_q = read_points_csv(str(cfg, "q_csv"));
  } else {
    throw UsageError("fit: data must be 'gaussian' or 'csv'");
  }
  samples.validate();

  KernelSpec kernel;
  if (str(cfg, "kernel") == "gaussian") {
    double sigma = num(cfg, "sigma");
    kernel = KernelSpec::gaussian(sigma > 0.0 ? sigma : median_heuristic(samples.pooled()));
  } else if (str(cfg, "kernel") == "polynomial") {
    kernel = KernelSpec::polynomial(integer(cfg, "degree"), num(cfg, "offset"));
  } else {
    throw UsageError("fit: kernel must be 'gaussian' or 'polynomial'");
  }

  FitOptions opt;
  opt.bfgs.max_iter = integer(cfg, "max_iter");
  opt.bfgs.grad_tol = num(cfg, "grad_tol");

  json metrics = {{"family", family}, {"k", k}, {"n_p", samples.xs_p.rows()},
                  {"n_q", samples.xs_q.rows()}, {"kernel", kernel_json(kernel)}};
  double alpha;
  if (cfg.values.at("alpha").is_string()) {
    CvResult cv = cross_validate_alpha(samples, loss, kernel, vec(cfg, "cv_grid"),
                                       integer(cfg, "cv_folds"), root.substream("cv"), opt);
    alpha = cv.alpha;
    json table = json::array();
    for (std::size_t i = 0; i < cv.grid.size(); ++i) {
      table.push_back({{"alpha", cv.grid[i]}, {"mean_risk", cv.mean_risk[i]}});
    }
    metrics["cv"] = table;
  } else {
    alpha = num(cfg, "alpha");
  }

  RatioModel model = fit(samples, loss, kernel, alpha, opt);
  PredictStats train_stats;
  predict_ratio(model, model.centers, &train_stats);
  metrics["alpha"] = alpha;
  metrics["train_objective"] = model.train_objective;
  metrics["optimizer_status"] = to_string(model.status);
  metrics["iterations"] = model.iterations;
  metrics["clamp_count"] = model.clamp_count;
  metrics["train_ratio_floored"] = train_stats.floored;
  metrics["train_ratio_capped"] = train_stats.capped;

  if (family == "kulsif") {
    RatioModel cf = fit_kulsif_closed_form(samples, kernel, alpha);
    metrics["closed_form_max_abs_diff"] =
        (predict_ratio_raw(model, model.centers) - predict_ratio_raw(cf, model.centers)).cwiseAbs().maxCoeff();
  }
  if (synthetic) {
    Rng se = root.substream("fit-eval");
    Points fresh = column_points(gp.sample(Which::Q, integer(cfg, "n_eval"), se));
    PredictStats st;
    metrics["mean_ratio_fresh_q"] = predict_ratio(model, fresh, &st).mean();
    double lo = gp.mu_q - 8.0 * gp.sigma_q, hi = gp.mu_q + 8.0 * gp.sigma_q;
    auto betahat = [&](double x) {
      Points p(1, 1);
      p(0, 0) = x;
      return predict_ratio(model, p)[0];
    };
    double err = divergence_quadrature(loss.generator(), [&](double x) { return gp.beta(x); }, betahat,
                                       [&](double x) { return gp.density(Which::Q, x); }, lo, hi, 2001);
    metrics["bregman_error"] = std::isfinite(err) ? json(err) : json(nullptr);
  }

  json model_json = {{"family", family},
                     {"k", k},
                     {"kernel", kernel_json(kernel)},
                     {"alpha", alpha},
                     {"centers", points_json(model.centers)},
                     {"coeffs", std::vector<double>(model.coeffs.data(), model.coeffs.data() + model.coeffs.size())},
                     {"clamp_count", model.clamp_count}};
  fs::path out = prepare_out(cfg);
  write_json(out / "model.json", model_json);
  write_json(out / "metrics.json", metrics);
}

void cmd_eval(const RunConfig& cfg) {
  std::ifstream in(str(cfg, "model"));
  if (!in) throw UsageError("cannot read model " + str(cfg, "model"));
  json mj;
  try {
    mj = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("model: ") + e.what());
  }
  std::vector<std::vector<double>> centers;
  std::vector<double> coeffs;
  RatioModel model{kernel_from_json(mj.at("kernel")), Points(), Eigen::VectorXd(),
                   loss_from(mj.at("family").get<std::string>(), mj.value("k", 0.0)),
                   mj.at("alpha").get<double>(), mj.value("clamp_count", 0)};
  try {
    centers = mj.at("centers").get<std::vector<std::vector<double>>>();
    coeffs = mj.at("coeffs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("model: ") + e.what());
  }
  if (centers.empty() || centers.size() != coeffs.size()) throw UsageError("model: centers/coeffs mismatch");
  model.centers.resize(static_cast<Eigen::Index>(centers.size()), static_cast<Eigen::Index>(centers[0].size()));
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].size() != centers[0].size()) throw UsageError("model: ragged centers");
    for (std::size_t j = 0; j < centers[i].size(); ++j) model.centers(i, j) = centers[i][j];
  }
  model.coeffs = Eigen::Map<Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));

  Points X = read_points_csv(str(cfg, "points"));
  if (X.cols() != model.centers.cols()) throw UsageError("eval: point dimension does not match the model");
  PredictStats st;
  Eigen::VectorXd scores = predict_scores(model, X);
  Eigen::VectorXd ratio = predict_ratio(model, X, &st);

  fs::path out = prepare_out(cfg);
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < X.cols(); ++j) header.push_back("x" + std::to_string(j));
  header.push_back("score");
  header.push_back("ratio");
  CsvWriter csv(out / "predictions.csv", header);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> r;
    for (Eigen::Index j = 0; j < X.cols(); ++j) r.push_back(X(i, j));
    r.push_back(scores[i]);
    r.push_back(ratio[i]);
    csv.row(r);
  }
  write_json(out / "predictions.json", {{"n", X.rows()},
                                        {"score_clamps", st.score_clamps},
                                        {"ratio_floored", st.floored},
                                        {"ratio_capped", st.capped}});
}

void cmd_fig1(const RunConfig& cfg) {
  PiecewisePairSpec pair = pair_from(cfg);
  double a = num(cfg, "sup_lo"), b = num(cfg, "sup_hi");
  std::vector<PopulationEstimate> est = population_estimates(pair, integer(cfg, "quad_nodes"), a, b);

  fs::path out = prepare_out(cfg);
  std::vector<std::string> header = {"x", "beta"};
  for (const auto& e : est) header.push_back(e.label);
  CsvWriter curves(out / "fig1_curves.csv", header);
  int n = integer(cfg, "grid_points");
  if (n < 2) throw UsageError("fig1: grid_points must be at least 2");
  for (int i = 0; i < n; ++i) {
    double x = (i == n - 1) ? pair.hi : pair.lo + (pair.hi - pair.lo) * i / (n - 1);
    std::vector<double> r = {x, piecewise_beta(pair, x)};
    for (const auto& e : est) r.push_back(e.fit(x));
    curves.row(r);
  }
  CsvWriter table(out / "fig1_table.csv", {"family", "theta1", "theta2", "divergence", "sup_error"});
  json summary = json::array();
  for (const auto& e : est) {
    table.row_strings({e.label, fmt_num(e.fit.theta1), fmt_num(e.fit.theta2), fmt_num(e.fit.divergence),
                       fmt_num(e.sup_error)});
    summary.push_back({{"family", e.label},
                       {"theta1", e.fit.theta1},
                       {"theta2", e.fit.theta2},
                       {"divergence", e.fit.divergence},
                       {"optimizer_status", to_string(e.fit.status)},
                       {"sup_error", e.sup_error}});
  }
  write_json(out / "fig1_summary.json", {{"sup_interval", {a, b}}, {"fits", summary}});
}

void cmd_fig2(const RunConfig& cfg) {
  GaussianPair gp = gaussian_from(cfg);
  std::vector<double> sizes = vec(cfg, "sizes"), alphas = vec(cfg, "alphas");
  std::vector<double> grid = uniform_grid(num(cfg, "grid_lo"), num(cfg, "grid_hi"), integer(cfg, "grid_points"));
  int max_iter = integer(cfg, "max_iter");
  Rng root(cfg.seed);

  fs::path out = prepare_out(cfg);
  CsvWriter curves(out / "fig2_curves.csv", {"size", "alpha", "family", "x", "beta", "betahat"});
  CsvWriter table(out / "fig2_table.csv",
                  {"size", "alpha", "family", "max_abs_betahat", "clamp_count", "clamp_exceeded", "status"});
  json cells = json::array();
  for (double size_d : sizes) {
    int size = static_cast<int>(size_d);
    if (size < 2 || size != size_d) throw UsageError("fig2: sizes must be integers >= 2");
    SampleSet s = gaussian_cell_samples(gp, size, root.substream("size-" + std::to_string(size)));
    for (double alpha : alphas) {
      for (const char* family : {"kulsif", "ew"}) {
        GaussianCellFit c = gaussian_cell_fit(s, family, alpha, grid, max_iter);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          curves.row_strings({std::to_string(size), fmt_num(alpha), family, fmt_num(grid[i]),
                              fmt_num(gp.beta(grid[i])), fmt_num(c.betahat[i])});
        }
        table.row_strings({std::to_string(size), fmt_num(alpha), family, fmt_num(c.max_abs),
                           std::to_string(c.clamp_count), c.clamp_exceeded ? "true" : "false",
                           to_string(c.status)});
        cells.push_back({{"size", size},
                         {"alpha", alpha},
                         {"family", family},
                         {"max_abs_betahat", c.max_abs},
                         {"clamp_count", c.clamp_count},
                         {"clamp_exceeded", c.clamp_exceeded},
                         {"optimizer_status", to_string(c.status)}});
      }
    }
  }
  write_json(out / "fig2_summary.json", {{"seed", cfg.seed}, {"cells", cells}});
}

void cmd_fig3(const RunConfig& cfg) {
  PiecewisePairSpec pair = pair_from(cfg);
  RegressionSettings st;
  st.n_src = integer(cfg, "n_src");
  st.n_tgt = integer(cfg, "n_tgt");
  st.noise = num(cfg, "noise");
  st.alpha = num(cfg, "alpha");
  st.degree = integer(cfg, "degree");
  st.offset = num(cfg, "offset");
  st.quad_nodes = integer(cfg, "quad_nodes");
  st.l2_nodes = integer(cfg, "l2_nodes");
  RegressionExperiment ex = run_weighted_regression(pair, st, Rng(cfg.seed).substream("fig3"));

  fs::path out = prepare_out(cfg);
  std::vector<std::string> header = {"x", "f_p"};
  for (const auto& o : ex.outcomes) header.push_back(o.weighting);
  int n = integer(cfg, "grid_points");
  if (n < 2) throw UsageError("fig3: grid_points must be at least 2");
  CsvWriter curves(out / "fig3_regressors.csv", header);
  for (int i = 0; i < n; ++i) {
    double x = (i == n - 1) ? pair.hi : pair.lo + (pair.hi - pair.lo) * i / (n - 1);
    Eigen::RowVectorXd p(1);
    p[0] = x;
    std::vector<double> r = {x, regression_target(x)};
    for (const auto& o : ex.outcomes) r.push_back(o.regressor(p));
    curves.row(r);
  }
  std::vector<std::string> eh = {"x", "f_p"};
  for (const auto& o : ex.outcomes) eh.push_back("abs_err_" + o.weighting);
  CsvWriter errs(out / "fig3_target_errors.csv", eh);
  for (double x : ex.task.tgt_xs) {
    Eigen::RowVectorXd p(1);
    p[0] = x;
    std::vector<double> r = {x, regression_target(x)};
    for (const auto& o : ex.outcomes) r.push_back(std::abs(o.regressor(p) - regression_target(x)));
    errs.row(r);
  }
  json l2p, l2q;
  for (const auto& o : ex.outcomes) {
    l2p[o.weighting] = o.l2_p;
    l2q[o.weighting] = o.l2_q;
  }
  write_json(out / "fig3_summary.json",
             {{"seed", cfg.seed},
              {"ew_estimate", {{"theta1", ex.ew_fit.theta1}, {"theta2", ex.ew_fit.theta2}}},
              {"lr_estimate", {{"theta1", ex.lr_fit.theta1}, {"theta2", ex.lr_fit.theta2}}},
              {"squared_l2_p", l2p},
              {"squared_l2_q", l2q}});
}

bool cmd_check(const RunConfig& cfg) {
  std::vector<CheckResult> results = run_identity_checks(cfg.seed);
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    arr.push_back({{"name", r.name},
                   {"max_residual", r.max_residual},
                   {"tolerance", r.tolerance},
                   {"evaluations", r.evaluations},
                   {"passed", r.passed}});
  }
  fs::path out = prepare_out(cfg);
  write_json(out / "check_report.json", {{"seed", cfg.seed}, {"passed", all}, {"checks", arr}});
  return all;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Density-ratio estimation with losses built from Bregman divergences"};
  app.require_subcommand(1);
  struct Flags {
    std::string config, out, family, alpha;
    std::uint64_t seed = 0;
    double k = 0.0;
  };
  Flags flags;
  const char* names[][2] = {
      {"loss-show", "Tabulate a constructed loss"},
      {"fit", "Fit a kernel density-ratio model"},
      {"eval", "Evaluate a saved model on points"},
      {"fig1", "Population parametric fits on a piecewise pair"},
      {"fig2", "Kernel estimates on a Gaussian pair over an alpha grid"},
      {"fig3", "Importance-weighted regression on the piecewise pair"},
      {"check", "Run the identity checks"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& n : names) {
    CLI::App* s = app.add_subcommand(n[0], n[1]);
    s->add_option("--config", flags.config, "JSON config file");
    s->add_option("--seed", flags.seed, "Random seed");
    s->add_option("--out", flags.out, "Output directory");
    s->add_option("--family", flags.family, "Loss family");
    s->add_option("--k", flags.k, "Poly exponent");
    s->add_option("--alpha", flags.alpha, "Regularisation weight or 'cv'");
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::string command = sub->get_name();
    json file_values;
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw UsageError("cannot read config " + flags.config);
      try {
        file_values = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
    }
    json overrides = json::object();
    if (sub->count("--seed")) overrides["seed"] = flags.seed;
    if (sub->count("--out")) overrides["out"] = flags.out;
    if (sub->count("--family")) overrides["family"] = flags.family;
    if (sub->count("--k")) overrides["k"] = flags.k;
    if (sub->count("--alpha")) {
      if (flags.alpha == "cv") {
        overrides["alpha"] = "cv";
      } else {
        try {
          std::size_t pos = 0;
          overrides["alpha"] = std::stod(flags.alpha, &pos);
          if (pos != flags.alpha.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw UsageError("--alpha must be a number or 'cv'");
        }
      }
    }
    RunConfig cfg = make_config(command, file_values, overrides);
    if (command == "loss-show") cmd_loss_show(cfg);
    else if (command == "fit") cmd_fit(cfg);
    else if (command == "eval") cmd_eval(cfg);
    else if (command == "fig1") cmd_fig1(cfg);
    else if (command == "fig2") cmd_fig2(cfg);
    else if (command == "fig3") cmd_fig3(cfg);
    else if (command == "check") {
      if (!cmd_check(cfg)) {
        std::cerr << "check: one or more identities failed, see " << (cfg.out_dir / "check_report.json").string()
                  << '\n';
        return 3;
      }
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace bregman
