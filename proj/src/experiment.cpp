#include "twofold/experiment.hpp"

#include "twofold/annulus.hpp"
#include "twofold/error.hpp"
#include "twofold/melnikov.hpp"
#include "twofold/predictor.hpp"
#include "twofold/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace twofold::experiment {

using json = nlohmann::json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Analyze: return "analyze";
    case Command::Melnikov: return "melnikov";
    case Command::Predict: return "predict";
    case Command::Simulate: return "simulate";
    case Command::Verify: return "verify";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view s) {
  for (Command c : {Command::Analyze, Command::Melnikov, Command::Predict, Command::Simulate, Command::Verify}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
}

double num(const json& j, const std::string& field) {
  if (!j.is_number()) invalid(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(field, "not finite");
  return v;
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) invalid(field, "expected an integer");
  return j.get<int>();
}

double positive(const json& j, const std::string& field) {
  const double v = num(j, field);
  if (!(v > 0.0)) invalid(field, "must be positive");
  return v;
}

Polynomial parse_poly(const json& j, const std::string& field) {
  if (!j.is_array()) invalid(field, "expected an array of [c, i, j] terms");
  Polynomial p;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string f = field + "[" + std::to_string(k) + "]";
    const json& t = j[k];
    if (!t.is_array() || t.size() != 3) invalid(f, "expected [c, i, j]");
    Monomial m{num(t[0], f + "[0]"), integer(t[1], f + "[1]"), integer(t[2], f + "[2]")};
    if (m.i < 0 || m.j < 0) invalid(f, "negative exponent");
    p.push_back(m);
  }
  return p;
}

std::vector<Forcing> parse_forcing(const json& j, const std::string& field, double sigma) {
  if (!j.is_array()) invalid(field, "expected an array of forcing terms");
  std::vector<Forcing> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string f = field + "[" + std::to_string(k) + "]";
    const json& t = j[k];
    if (!t.is_object()) invalid(f, "expected an object");
    Forcing fc;
    fc.amplitude = t.contains("amplitude") ? num(t["amplitude"], f + ".amplitude") : 1.0;
    fc.frequency = t.contains("frequency") ? num(t["frequency"], f + ".frequency") : 0.0;
    fc.phase = t.contains("phase") ? num(t["phase"], f + ".phase") : 0.0;
    if (t.contains("poly")) fc.poly = parse_poly(t["poly"], f + ".poly");
    // The forcing must be 2 sigma periodic: frequency * sigma / pi is an integer.
    const double n = fc.frequency * sigma / std::numbers::pi;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, std::abs(n))) {
      std::ostringstream os;
      os << "frequency " << fc.frequency << " is not a multiple of pi/sigma = " << std::numbers::pi / sigma;
      invalid(f + ".frequency", os.str());
    }
    out.push_back(fc);
  }
  return out;
}

std::array<std::vector<Forcing>, 2> parse_forcing_pair(const json& j, const std::string& field, double sigma) {
  std::array<std::vector<Forcing>, 2> out;
  if (!j.is_object()) invalid(field, "expected {\"x\": [...], \"y\": [...]}");
  if (j.contains("x")) out[0] = parse_forcing(j["x"], field + ".x", sigma);
  if (j.contains("y")) out[1] = parse_forcing(j["y"], field + ".y", sigma);
  return out;
}

InlineModel parse_inline(const json& j, double sigma) {
  InlineModel m;
  if (!j.contains("f_minus")) invalid("model.f_minus", "missing");
  const json& f = j["f_minus"];
  if (!f.is_object() || !f.contains("x") || !f.contains("y")) invalid("model.f_minus", "expected {\"x\", \"y\"}");
  m.f_minus[0] = parse_poly(f["x"], "model.f_minus.x");
  m.f_minus[1] = parse_poly(f["y"], "model.f_minus.y");
  if (j.contains("g_minus")) m.g_minus = parse_forcing_pair(j["g_minus"], "model.g_minus", sigma);
  if (j.contains("g_plus")) m.g_plus = parse_forcing_pair(j["g_plus"], "model.g_plus", sigma);
  return m;
}

std::array<double, 2> parse_range(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) invalid(field, "expected [lo, hi]");
  const std::array<double, 2> r{num(j[0], field + "[0]"), num(j[1], field + "[1]")};
  if (!(r[0] < r[1])) invalid(field, "lo must be below hi");
  return r;
}

std::vector<double> check_epsilons(std::vector<double> eps, const std::string& field) {
  if (eps.empty()) invalid(field, "empty list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0) || !std::isfinite(eps[k])) invalid(field, "entries must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) invalid(field, "must be sorted strictly descending");
  }
  return eps;
}

void refresh_hash(ExperimentConfig& cfg, json doc) {
  doc.erase("output");
  doc["epsilon"] = cfg.epsilons;
  cfg.canonical = doc.dump();
  cfg.hash = fnv1a64(cfg.canonical);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) invalid("config", "top level must be an object");
  static const std::vector<std::string> known{"model", "params", "epsilon", "grids", "tolerances", "simulate",
                                              "output"};
  for (const auto& [k, v] : doc.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) invalid(k, "unknown key");
  }

  ExperimentConfig cfg;
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) invalid("params", "expected an object");
    if (p.contains("alpha")) cfg.params.alpha = positive(p["alpha"], "params.alpha");
    if (p.contains("lambda")) cfg.params.lambda = num(p["lambda"], "params.lambda");
    if (p.contains("sigma")) cfg.params.sigma = positive(p["sigma"], "params.sigma");
  }
  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (m.is_string()) {
      cfg.model_name = m.get<std::string>();
      if (cfg.model_name != "hamiltonian-twofold") invalid("model", "unknown model '" + cfg.model_name + "'");
    } else if (m.is_object()) {
      cfg.model_name = "inline";
      cfg.inline_model = parse_inline(m, cfg.params.sigma);
    } else {
      invalid("model", "expected a registry name or an inline field spec");
    }
  }
  if (doc.contains("epsilon")) {
    const json& e = doc["epsilon"];
    if (!e.is_array()) invalid("epsilon", "expected an array");
    std::vector<double> eps;
    for (std::size_t k = 0; k < e.size(); ++k) eps.push_back(num(e[k], "epsilon[" + std::to_string(k) + "]"));
    cfg.epsilons = check_epsilons(std::move(eps), "epsilon");
  }
  if (doc.contains("grids")) {
    const json& g = doc["grids"];
    if (!g.is_object()) invalid("grids", "expected an object");
    auto count = [&](const char* key, int& dst, int lo) {
      if (!g.contains(key)) return;
      dst = integer(g[key], std::string("grids.") + key);
      if (dst < lo) invalid(std::string("grids.") + key, "must be at least " + std::to_string(lo));
    };
    count("theta", cfg.grids.theta, 1);
    count("x", cfg.grids.x, 1);
    count("sigma_table", cfg.grids.sigma_table, 2);
    if (g.contains("x_range")) cfg.grids.x_range = parse_range(g["x_range"], "grids.x_range");
    if (g.contains("fold_range")) cfg.grids.fold_range = parse_range(g["fold_range"], "grids.fold_range");
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) invalid("tolerances", "expected an object");
    auto pos = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = positive(t[key], std::string("tolerances.") + key);
    };
    pos("rtol", cfg.tol.ode.rtol);
    pos("atol", cfg.tol.ode.atol);
    pos("h_max", cfg.tol.ode.h_max);
    pos("tangency", cfg.tol.tangency);
    pos("event", cfg.tol.event);
    pos("horizon", cfg.tol.horizon);
    pos("quad", cfg.tol_quad);
    cfg.tol.ode.event_tol = cfg.tol.event;
  }
  if (doc.contains("simulate")) {
    const json& s = doc["simulate"];
    if (!s.is_object()) invalid("simulate", "expected an object");
    if (s.contains("theta0")) cfg.simulate.theta0 = num(s["theta0"], "simulate.theta0");
    if (s.contains("x0")) cfg.simulate.x0 = num(s["x0"], "simulate.x0");
    if (s.contains("y0")) cfg.simulate.y0 = num(s["y0"], "simulate.y0");
    if (s.contains("periods")) cfg.simulate.periods = positive(s["periods"], "simulate.periods");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) invalid("output", "expected a directory path");
    cfg.output_dir = doc["output"].get<std::string>();
  }
  refresh_hash(cfg, doc);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void override_epsilons(ExperimentConfig& cfg, std::vector<double> eps) {
  cfg.epsilons = check_epsilons(std::move(eps), "--epsilon");
  refresh_hash(cfg, json::parse(cfg.canonical));
}

// ---------------------------------------------------------------- models

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

double poly_eval(const Polynomial& p, const Vec2& z) {
  double s = 0.0;
  for (const auto& m : p) s += m.c * ipow(z.x(), m.i) * ipow(z.y(), m.j);
  return s;
}

Vec2 poly_grad(const Polynomial& p, const Vec2& z) {
  Vec2 g = Vec2::Zero();
  for (const auto& m : p) {
    if (m.i > 0) g.x() += m.c * m.i * ipow(z.x(), m.i - 1) * ipow(z.y(), m.j);
    if (m.j > 0) g.y() += m.c * m.j * ipow(z.x(), m.i) * ipow(z.y(), m.j - 1);
  }
  return g;
}

SmoothField forcing_field(const std::array<std::vector<Forcing>, 2>& fc, double period) {
  auto eval = [fc](double t, const Vec2& z) {
    Vec2 v = Vec2::Zero();
    for (int c = 0; c < 2; ++c) {
      for (const auto& f : fc[c]) v[c] += f.amplitude * std::sin(f.frequency * t + f.phase) * poly_eval(f.poly, z);
    }
    return v;
  };
  auto jac = [fc](double t, const Vec2& z) {
    Mat2 j = Mat2::Zero();
    for (int c = 0; c < 2; ++c) {
      for (const auto& f : fc[c]) {
        j.row(c) += f.amplitude * std::sin(f.frequency * t + f.phase) * poly_grad(f.poly, z).transpose();
      }
    }
    return j;
  };
  return SmoothField::periodic(eval, jac, period);
}

}  // namespace

FilippovModel build_model(const ExperimentConfig& cfg, double epsilon) {
  if (!cfg.inline_model) return hamiltonian::make_model(cfg.params, epsilon);
  const InlineModel& im = *cfg.inline_model;
  const auto fx = im.f_minus;
  SmoothField fm = SmoothField::autonomous(
      [fx](const Vec2& z) { return Vec2(poly_eval(fx[0], z), poly_eval(fx[1], z)); },
      [fx](const Vec2& z) {
        Mat2 j;
        j.row(0) = poly_grad(fx[0], z).transpose();
        j.row(1) = poly_grad(fx[1], z).transpose();
        return j;
      });
  const double per = 2.0 * cfg.params.sigma;
  return FilippovModel::reversible(fm, forcing_field(im.g_minus, per), forcing_field(im.g_plus, per),
                                   cfg.params.sigma, epsilon);
}

// ---------------------------------------------------------------- pool

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lk(mu);
          if (!first) first = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    if (err->code() == ErrorCode::ConfigInvalid) return 2;
    if (is_hypothesis_violation(err->code())) return 3;
    return 4;
  }
  if (dynamic_cast<const json::exception*>(&e)) return 2;
  return 4;
}

// ---------------------------------------------------------------- commands

std::string_view csv_columns(Command c) {
  switch (c) {
    case Command::Analyze:
      return "analyze.csv: quantity,value\n"
             "sigma_bar.csv: x,sigma_bar,sigma_prime";
    case Command::Melnikov:
      return "melnikov.csv: theta,x,M,err";
    case Command::Predict:
      return "predictions.csv: sigma,theta,x,slope,classification,g,threshold,tau_star,note";
    case Command::Simulate:
      return "trajectory_eps<E>.csv: t,x,y,mode,event_flag\n"
             "  mode: above|below|sliding; event_flag: 0 none, 1 cross, 2 enter sliding,\n"
             "  3 exit sliding at a fold, 4 tangency";
    case Command::Verify:
      return "verify.csv: epsilon,theta_pred,x_pred,classification,theta_fix,x_fix,residual,distance,"
             "sliding_time,tau_eps,tau_star,status\n"
             "sliding_eps<E>_theta<T>.csv: t,x,y,mode,event_flag (one per sliding cycle found)";
  }
  return "";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string tag(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

class Collector {
 public:
  Collector(const ExperimentConfig& cfg, RunResult& res) : cfg_(cfg), res_(res) {
    std::filesystem::create_directories(cfg.output_dir);
  }

  std::ofstream open(const std::string& name) {
    const std::filesystem::path p = std::filesystem::path(cfg_.output_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error(ErrorCode::ConfigInvalid, "output: cannot write " + p.string());
    os << "# twofold-cli " << kVersion << " config-hash=" << std::hex << std::setw(16) << std::setfill('0')
       << cfg_.hash << std::dec << std::setfill(' ') << '\n';
    res_.artifacts.push_back(p);
    return os;
  }

 private:
  const ExperimentConfig& cfg_;
  RunResult& res_;
};

AnnulusData analyze(const ExperimentConfig& cfg) {
  const FilippovModel m = build_model(cfg);
  return analyze_annulus(m.f_minus, cfg.grids.fold_range[0], cfg.grids.fold_range[1], cfg.tol);
}

PredictionReport predictions(const ExperimentConfig& cfg, const AnnulusData& data, double eps) {
  const FilippovModel m = build_model(cfg, eps);
  if (std::abs(m.sigma - data.sigma_v) <= 1e-9 * data.sigma_v) return predict_twofold(m, data);
  return predict_annulus(m, data, m.sigma);
}

void cmd_analyze(const ExperimentConfig& cfg, Collector& out) {
  const AnnulusData d = analyze(cfg);
  std::ofstream a = out.open("analyze.csv");
  a << "quantity,value\n";
  const std::pair<const char*, double> rows[] = {
      {"x_i", d.folds.x_i},           {"x_v", d.folds.x_v},         {"F1_i", d.folds.F1_i},
      {"F1_v", d.folds.F1_v},         {"dF2dx_i", d.folds.dF2dx_i}, {"dF2dx_v", d.folds.dF2dx_v},
      {"q_v_x", d.q_v.x()},           {"q_v_y", d.q_v.y()},         {"F2_qv", d.F2_qv},
      {"sigma_v", d.sigma_v},         {"sigma_M", d.sigma_M},       {"x_at_sigma_M", d.x_at_sigma_M},
      {"twofold_prefactor", twofold_prefactor(d)}};
  for (const auto& [k, v] : rows) a << k << ',' << fmt(v) << '\n';

  std::ofstream s = out.open("sigma_bar.csv");
  s << "x,sigma_bar,sigma_prime\n";
  const int n = cfg.grids.sigma_table;
  const double xi = d.folds.x_i, xv = d.folds.x_v;
  for (int k = 1; k <= n; ++k) {
    const double x = xi + (xv - xi) * k / n;
    s << fmt(x) << ',' << fmt(half_return_time(d, x)) << ',' << fmt(sigma_prime(d, x)) << '\n';
  }
}

void cmd_melnikov(const ExperimentConfig& cfg, int jobs, Collector& out) {
  const AnnulusData d = analyze(cfg);
  const FilippovModel m = build_model(cfg);
  std::vector<double> th, xs;
  for (int i = 0; i < cfg.grids.theta; ++i) th.push_back(m.period() * i / cfg.grids.theta);
  const int nx = cfg.grids.x;
  if (cfg.grids.x_range) {
    const auto [lo, hi] = *cfg.grids.x_range;
    for (int k = 0; k < nx; ++k) xs.push_back(nx == 1 ? lo : lo + (hi - lo) * k / (nx - 1));
  } else {
    for (int k = 1; k <= nx; ++k) xs.push_back(d.folds.x_i + (d.folds.x_v - d.folds.x_i) * k / nx);
  }
  const MelnikovGrid g = melnikov_grid(m, d, th, xs, jobs, cfg.tol_quad);
  std::ofstream os = out.open("melnikov.csv");
  os << "theta,x,M,err\n";
  for (std::size_t i = 0; i < g.thetas.size(); ++i) {
    for (std::size_t j = 0; j < g.xs.size(); ++j) {
      os << fmt(g.thetas[i]) << ',' << fmt(g.xs[j]) << ',' << fmt(g.at(i, j)) << ','
         << fmt(g.errors[i * g.xs.size() + j]) << '\n';
    }
  }
}

void cmd_predict(const ExperimentConfig& cfg, Collector& out, RunResult& res) {
  const AnnulusData d = analyze(cfg);
  const PredictionReport rep = predictions(cfg, d, 0.0);
  std::ofstream os = out.open("predictions.csv");
  for (const auto& n : rep.notes) os << "# note: " << n << '\n';
  os << "sigma,theta,x,slope,classification,g,threshold,tau_star,note\n";
  for (const auto& p : rep.predictions) {
    os << fmt(rep.sigma) << ',' << fmt(p.theta) << ',' << fmt(p.x) << ',' << fmt(p.slope) << ','
       << to_string(p.kind) << ',';
    if (p.twofold) {
      os << fmt(p.twofold->g) << ',' << fmt(p.twofold->threshold) << ','
         << (p.twofold->tau_star ? fmt(*p.twofold->tau_star) : "");
    } else {
      os << ",,";
    }
    os << ',' << csv_escape(p.note) << '\n';
  }
  if (rep.predictions.empty()) res.message = "no simple Melnikov zeros";
}

void cmd_simulate(const ExperimentConfig& cfg, int jobs, Collector& out) {
  const SimulateSettings& st = cfg.simulate;
  std::optional<AnnulusData> d;
  if (!st.x0 || !st.theta0) d = analyze(cfg);
  std::vector<HybridTrajectory> trs(cfg.epsilons.size());
  parallel_for(trs.size(), jobs, [&](std::size_t k) {
    const double eps = cfg.epsilons[k];
    const FilippovModel m = build_model(cfg, eps);
    double th = st.theta0.value_or(0.0), x = st.x0.value_or(0.0);
    if (d) {
      const PredictionReport rep = predictions(cfg, *d, eps);
      if (rep.predictions.empty()) {
        if (!st.x0) x = rep.x_star;
      } else {
        const Prediction& p = rep.predictions.front();
        if (!st.theta0) th = p.theta;
        if (!st.x0) {
          const bool sliding =
              p.kind == Classification::SlidingOnSigmaS || p.kind == Classification::SlidingOnSigmaE;
          // A sliding prediction sits on the fold itself; start on the perturbed fold of X-.
          x = sliding ? perturbed_fold(m, Side::Minus, th, d->folds.x_v) : p.x;
        }
      }
    }
    trs[k] = flow_filippov(m, th, Vec2(x, st.y0), st.periods * m.period(), cfg.tol);
  });
  for (std::size_t k = 0; k < trs.size(); ++k) {
    std::ofstream os = out.open("trajectory_eps" + tag(cfg.epsilons[k]) + ".csv");
    trs[k].write_csv(os);
  }
}

struct VerifyRow {
  double eps = 0.0;
  Prediction pred;
  double theta_fix = NAN, x_fix = NAN, residual = NAN, distance = NAN;
  double sliding_time = NAN, tau_eps = NAN, tau_star = NAN;
  std::string status = "ok";
  std::optional<HybridTrajectory> trajectory;
};

void cmd_verify(const ExperimentConfig& cfg, int jobs, Collector& out, RunResult& res) {
  const AnnulusData d = analyze(cfg);
  const FilippovModel m0 = build_model(cfg);
  const PredictionReport base = predictions(cfg, d, 0.0);
  std::vector<VerifyRow> rows;
  for (double eps : cfg.epsilons) {
    for (const auto& p : base.predictions) {
      VerifyRow r;
      r.eps = eps;
      r.pred = p;
      rows.push_back(std::move(r));
    }
  }
  parallel_for(rows.size(), jobs, [&](std::size_t k) {
    VerifyRow& r = rows[k];
    try {
      switch (r.pred.kind) {
        case Classification::CrossingAnnulus:
        case Classification::CrossingTwoFold: {
          const FilippovModel m = build_model(cfg, r.eps);
          if (r.pred.kind == Classification::CrossingTwoFold && r.pred.twofold) {
            r.pred.x = d.folds.x_v + r.eps * r.pred.twofold->chi_star;
          }
          const FixedPointResult fp = find_fixed_point(m, r.pred.theta, r.pred.x, cfg.tol);
          r.theta_fix = fp.theta_fix;
          r.x_fix = fp.z_fix.x();
          r.residual = fp.residual;
          r.distance = fp.distance;
          break;
        }
        case Classification::SlidingOnSigmaS:
        case Classification::SlidingOnSigmaE: {
          const SlidingCycle c = locate_sliding_cycle(m0, d, r.pred.theta, r.eps, cfg.tol);
          r.theta_fix = c.theta_eps;
          r.x_fix = c.x_eps;
          r.residual = c.closure;
          r.distance = c.offset;
          r.sliding_time = c.report.sliding_time;
          r.tau_eps = c.report.tau_eps;
          if (c.report.tau_star) r.tau_star = *c.report.tau_star;
          if (!c.report.sliding_region_ok) r.status = "sliding-region-violation";
          r.trajectory = c.report.trajectory;
          break;
        }
        case Classification::Inconclusive:
          r.status = "skipped";
          break;
      }
    } catch (const Error& e) {
      r.status = std::string(to_string(e.code()));
    }
  });

  std::ofstream os = out.open("verify.csv");
  os << "epsilon,theta_pred,x_pred,classification,theta_fix,x_fix,residual,distance,sliding_time,tau_eps,tau_star,"
        "status\n";
  int failed = 0;
  for (const auto& r : rows) {
    auto opt = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };
    os << fmt(r.eps) << ',' << fmt(r.pred.theta) << ',' << fmt(r.pred.x) << ',' << to_string(r.pred.kind) << ','
       << opt(r.theta_fix) << ',' << opt(r.x_fix) << ',' << opt(r.residual) << ',' << opt(r.distance) << ','
       << opt(r.sliding_time) << ',' << opt(r.tau_eps) << ',' << opt(r.tau_star) << ',' << r.status << '\n';
    if (r.status != "ok" && r.status != "skipped") ++failed;
  }
  for (const auto& r : rows) {
    if (!r.trajectory) continue;
    std::ofstream t = out.open("sliding_eps" + tag(r.eps) + "_theta" + tag(r.pred.theta) + ".csv");
    r.trajectory->write_csv(t);
  }
  if (rows.empty()) res.message = "no predictions to verify";
  if (failed > 0) {
    res.exit_code = 4;
    res.message = std::to_string(failed) + " verification point(s) failed; see verify.csv";
  }
}

}  // namespace

RunResult run(Command cmd, const ExperimentConfig& cfg, int jobs) {
  RunResult res;
  try {
    Collector out(cfg, res);
    switch (cmd) {
      case Command::Analyze: cmd_analyze(cfg, out); break;
      case Command::Melnikov: cmd_melnikov(cfg, jobs, out); break;
      case Command::Predict: cmd_predict(cfg, out, res); break;
      case Command::Simulate: cmd_simulate(cfg, jobs, out); break;
      case Command::Verify: cmd_verify(cfg, jobs, out, res); break;
    }
  } catch (const std::exception& e) {
    res.exit_code = exit_code_for(e);
    res.message = std::string(to_string(cmd)) + ": " + e.what();
  }
  return res;
}

}  // namespace twofold::experiment
