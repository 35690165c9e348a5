#include "tensormp/config.hpp"

#include <cmath>
#include <set>

namespace tensormp {

namespace {

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void check_object(const Json& j, const std::string& context) {
  if (!j.is_object()) fail(context + ": expected an object");
}

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      std::string keys;
      for (const auto& k : allowed) keys += (keys.empty() ? "" : ", ") + k;
      fail(context + ": unknown key '" + item.key() + "' (allowed: " + keys + ")");
    }
  }
}

const Json& require(const Json& j, const std::string& key,
                    const std::string& context) {
  if (!j.contains(key)) fail(context + ": missing field '" + key + "'");
  return j.at(key);
}

double require_number(const Json& j, const std::string& key,
                      const std::string& context) {
  const Json& v = require(j, key, context);
  if (!v.is_number()) fail(context + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t require_integer(const Json& j, const std::string& key,
                             const std::string& context) {
  const Json& v = require(j, key, context);
  if (!v.is_number_integer()) fail(context + ": field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string require_string(const Json& j, const std::string& key,
                           const std::string& context) {
  const Json& v = require(j, key, context);
  if (!v.is_string()) fail(context + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Complex parse_complex(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(context + ": expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

VectorModel parse_model(const Json& j, const std::string& context) {
  check_object(j, context);
  const std::string kind = require_string(j, "kind", context);
  if (kind == "sphere") {
    check_keys(j, {"kind"}, context);
    return VectorModel::sphere();
  }
  if (kind == "lp") {
    check_keys(j, {"kind", "p"}, context);
    const double p = require_number(j, "p", context);
    if (!(p >= 1.0)) fail(context + ": lp model needs p >= 1");
    return VectorModel::lp_ball(p);
  }
  if (kind == "iid") {
    check_keys(j, {"kind", "law"}, context);
    const std::string law = require_string(j, "law", context);
    if (law == "gaussian") return VectorModel::iid(ComponentLaw::Gaussian);
    if (law == "rademacher") return VectorModel::iid(ComponentLaw::Rademacher);
    if (law == "uniform") return VectorModel::iid(ComponentLaw::UniformSym);
    if (law == "student") return VectorModel::iid(ComponentLaw::StudentLikeBounded);
    fail(context + ": unknown law '" + law +
         "' (valid laws: gaussian, rademacher, uniform, student)");
  }
  fail(context + ": unknown model kind '" + kind +
       "' (valid kinds: iid, sphere, lp)");
}

TauSpec parse_taus(const Json& j, const std::string& context) {
  check_object(j, context);
  const std::string kind = require_string(j, "kind", context);
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, context);
    return TauSpec::constant(require_number(j, "value", context));
  }
  if (kind == "list") {
    check_keys(j, {"kind", "values"}, context);
    const Json& values = require(j, "values", context);
    if (!values.is_array() || values.empty()) {
      fail(context + ": 'values' must be a non-empty array");
    }
    std::vector<double> out;
    for (const auto& v : values) {
      if (!v.is_number()) fail(context + ": tau values must be numbers");
      out.push_back(v.get<double>());
    }
    return TauSpec::explicit_list(std::move(out));
  }
  if (kind == "discrete") {
    check_keys(j, {"kind", "atoms"}, context);
    const Json& atoms = require(j, "atoms", context);
    if (!atoms.is_array() || atoms.empty()) {
      fail(context + ": 'atoms' must be a non-empty array of [value, weight]");
    }
    std::vector<MeasureAtom> out;
    for (const auto& a : atoms) {
      if (!a.is_array() || a.size() != 2) {
        fail(context + ": each atom must be [value, weight]");
      }
      out.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    try {
      return TauSpec::discrete(std::move(out));
    } catch (const std::invalid_argument& e) {
      fail(context + ": " + e.what());
    }
  }
  fail(context + ": unknown taus kind '" + kind +
       "' (valid kinds: constant, list, discrete)");
}

TestFunction parse_phi(const Json& j, const std::string& context) {
  check_object(j, context);
  const std::string kind = require_string(j, "kind", context);
  try {
    if (kind == "gaussian-bump") {
      check_keys(j, {"kind", "center", "width"}, context);
      return TestFunction::gaussian_bump(require_number(j, "center", context),
                                         require_number(j, "width", context));
    }
    if (kind == "poisson-indicator") {
      check_keys(j, {"kind", "lo", "hi", "eta"}, context);
      return TestFunction::poisson_smoothed_indicator(
          require_number(j, "lo", context), require_number(j, "hi", context),
          require_number(j, "eta", context));
    }
    if (kind == "cauchy") {
      check_keys(j, {"kind", "center", "scale"}, context);
      return TestFunction::cauchy(require_number(j, "center", context),
                                  require_number(j, "scale", context));
    }
    if (kind == "monomial") {
      check_keys(j, {"kind", "degree", "window"}, context);
      const int degree = static_cast<int>(require_integer(j, "degree", context));
      const Json& window = require(j, "window", context);
      if (window.is_null()) return TestFunction::monomial_untapered(degree);
      if (!window.is_array() || window.size() != 2) {
        fail(context + ": 'window' must be [lo, hi] or null");
      }
      return TestFunction::monomial(degree, window[0].get<double>(),
                                    window[1].get<double>());
    }
    if (kind == "constant") {
      check_keys(j, {"kind", "value"}, context);
      return TestFunction::constant(require_number(j, "value", context));
    }
  } catch (const std::invalid_argument& e) {
    fail(context + ": " + e.what());
  }
  fail(context + ": unknown phi kind '" + kind +
       "' (valid kinds: gaussian-bump, poisson-indicator, cauchy, monomial, "
       "constant)");
}

EnsembleConfig parse_ensemble(const Json& j, const std::string& context) {
  check_object(j, context);
  check_keys(j, {"n", "k", "m", "c", "model", "taus", "seed"}, context);
  const auto n = static_cast<Eigen::Index>(require_integer(j, "n", context));
  const int k = static_cast<int>(require_integer(j, "k", context));
  const VectorModel model = parse_model(require(j, "model", context), context + ".model");
  TauSpec taus = parse_taus(require(j, "taus", context), context + ".taus");
  const auto seed = static_cast<std::uint64_t>(require_integer(j, "seed", context));
  const bool has_m = j.contains("m");
  const bool has_c = j.contains("c");
  if (has_m == has_c) fail(context + ": give exactly one of 'm' or 'c'");
  try {
    if (has_m) {
      const auto m = static_cast<Eigen::Index>(require_integer(j, "m", context));
      return EnsembleConfig::with_m(n, k, m, model, std::move(taus), seed);
    }
    return EnsembleConfig::with_ratio(n, k, require_number(j, "c", context), model,
                                      std::move(taus), seed);
  } catch (const std::invalid_argument& e) {
    fail(context + ": " + e.what());
  }
}

namespace {

std::size_t parse_replicates(const Json& j, const std::string& context) {
  const auto reps = require_integer(j, "replicates", context);
  if (reps < 2) fail(context + ": replicates must be >= 2");
  return static_cast<std::size_t>(reps);
}

std::vector<TestFunction> parse_phis(const Json& j, const std::string& context) {
  const Json& phis = require(j, "phis", context);
  if (!phis.is_array() || phis.empty()) {
    fail(context + ": 'phis' must be a non-empty array");
  }
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    out.push_back(parse_phi(phis[i], context + ".phis[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> parse_eta_schedule(const Json& j, const std::string& context) {
  if (!j.contains("eta_schedule")) return {};
  const Json& sched = j.at("eta_schedule");
  if (!sched.is_array() || sched.size() < 2) {
    fail(context + ": 'eta_schedule' must be an array of >= 2 decreasing values");
  }
  std::vector<double> out;
  for (const auto& v : sched) out.push_back(v.get<double>());
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] < out[i - 1])) {
      fail(context + ": 'eta_schedule' must strictly decrease");
    }
  }
  return out;
}

HSpec parse_h(const Json& j, const std::string& context) {
  check_object(j, context);
  const std::string kind = require_string(j, "kind", context);
  HSpec h;
  if (kind == "identity") {
    check_keys(j, {"kind"}, context);
    h.kind = HSpec::Kind::Identity;
    return h;
  }
  if (kind == "resolvent") {
    check_keys(j, {"kind", "z", "ensemble"}, context);
    h.kind = HSpec::Kind::Resolvent;
    h.z = parse_complex(require(j, "z", context), context + ".z");
    if (h.z.imag() == 0.0) fail(context + ": resolvent point must be off the real axis");
    h.ensemble = parse_ensemble(require(j, "ensemble", context), context + ".ensemble");
    return h;
  }
  fail(context + ": unknown h kind '" + kind + "' (valid kinds: identity, resolvent)");
}

std::optional<double> optional_number(const Json& j, const std::string& key,
                                      const std::string& context) {
  if (!j.contains(key)) return std::nullopt;
  const Json& v = j.at(key);
  if (!v.is_number()) fail(context + ": field '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

Job parse_job(const Json& config) {
  check_object(config, "config");
  const std::string experiment = require_string(config, "experiment", "config");
  Job job;
  job.experiment = experiment;
  job.out = config.contains("out") ? require_string(config, "out", "config") : "";

  if (experiment == "esd") {
    check_keys(config,
               {"experiment", "out", "ensemble", "replicates", "histogram_bins",
                "dump_spectra"},
               "config");
    EsdJob esd;
    esd.ensemble = parse_ensemble(require(config, "ensemble", "config"), "ensemble");
    esd.replicates = parse_replicates(config, "config");
    if (config.contains("histogram_bins")) {
      esd.histogram_bins = static_cast<int>(require_integer(config, "histogram_bins", "config"));
      if (esd.histogram_bins < 1) fail("config: histogram_bins must be >= 1");
    }
    if (config.contains("dump_spectra")) {
      if (!config.at("dump_spectra").is_boolean()) fail("config: dump_spectra must be boolean");
      esd.dump_spectra = config.at("dump_spectra").get<bool>();
    }
    job.payload = std::move(esd);
    return job;
  }
  if (experiment == "clt") {
    check_keys(config, {"experiment", "out", "ensemble", "replicates", "phis"},
               "config");
    CltJob clt;
    clt.ensemble = parse_ensemble(require(config, "ensemble", "config"), "ensemble");
    clt.replicates = parse_replicates(config, "config");
    clt.phis = parse_phis(config, "config");
    job.payload = std::move(clt);
    return job;
  }
  if (experiment == "bilinear") {
    check_keys(config,
               {"experiment", "out", "model", "n", "replicates", "h", "seed", "a", "b"},
               "config");
    BilinearJob bil;
    bil.model = parse_model(require(config, "model", "config"), "model");
    bil.n = static_cast<Eigen::Index>(require_integer(config, "n", "config"));
    if (bil.n < 2) fail("config: n must be >= 2");
    bil.replicates = parse_replicates(config, "config");
    bil.h = parse_h(require(config, "h", "config"), "h");
    bil.seed = static_cast<std::uint64_t>(require_integer(config, "seed", "config"));
    bil.a = optional_number(config, "a", "config");
    bil.b = optional_number(config, "b", "config");
    job.payload = std::move(bil);
    return job;
  }
  if (experiment == "cov") {
    check_keys(config,
               {"experiment", "out", "ensemble", "replicates", "probes", "a", "b"},
               "config");
    CovJob cov;
    cov.ensemble = parse_ensemble(require(config, "ensemble", "config"), "ensemble");
    cov.replicates = parse_replicates(config, "config");
    const Json& probes = require(config, "probes", "config");
    if (!probes.is_array() || probes.empty()) {
      fail("config: 'probes' must be a non-empty array of [[re,im],[re,im]]");
    }
    for (const auto& p : probes) {
      if (!p.is_array() || p.size() != 2) {
        fail("config: each probe must be a [z1, z2] pair");
      }
      cov.probes.push_back({parse_complex(p[0], "probes.z1"),
                            parse_complex(p[1], "probes.z2")});
    }
    cov.a = optional_number(config, "a", "config");
    cov.b = optional_number(config, "b", "config");
    job.payload = std::move(cov);
    return job;
  }
  if (experiment == "mp-solve") {
    check_keys(config,
               {"experiment", "out", "taus", "c", "grid", "density"},
               "config");
    MpSolveJob mp;
    mp.taus = parse_taus(require(config, "taus", "config"), "taus");
    mp.c = require_number(config, "c", "config");
    if (!(mp.c > 0.0)) fail("config: c must be > 0");
    const Json& grid = require(config, "grid", "config");
    check_object(grid, "grid");
    if (grid.contains("explicit")) {
      check_keys(grid, {"explicit"}, "grid");
      for (const auto& z : grid.at("explicit")) {
        mp.grid.push_back(parse_complex(z, "grid.explicit"));
      }
      if (mp.grid.empty()) fail("grid: empty explicit grid");
    } else {
      check_keys(grid, {"re_min", "re_max", "points", "eta"}, "grid");
      const double re_min = require_number(grid, "re_min", "grid");
      const double re_max = require_number(grid, "re_max", "grid");
      const auto points = require_integer(grid, "points", "grid");
      const double eta = require_number(grid, "eta", "grid");
      if (!(re_max > re_min) || points < 2 || !(eta > 0.0)) {
        fail("grid: need re_max > re_min, points >= 2, eta > 0");
      }
      for (std::int64_t i = 0; i < points; ++i) {
        const double re =
            re_min + (re_max - re_min) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
        mp.grid.emplace_back(re, eta);
      }
    }
    if (config.contains("density")) {
      const Json& density = config.at("density");
      check_object(density, "density");
      check_keys(density, {"points", "eta_schedule"}, "density");
      mp.with_density = true;
      if (density.contains("points")) {
        mp.density_points = static_cast<int>(require_integer(density, "points", "density"));
        if (mp.density_points < 2) fail("density: points must be >= 2");
      }
      mp.eta_schedule = parse_eta_schedule(density, "density");
    }
    job.payload = std::move(mp);
    return job;
  }
  if (experiment == "predict-variance") {
    check_keys(config,
               {"experiment", "out", "taus", "c", "a", "b", "phis", "eta_schedule"},
               "config");
    PredictVarianceJob pv;
    pv.taus = parse_taus(require(config, "taus", "config"), "taus");
    pv.c = require_number(config, "c", "config");
    if (!(pv.c > 0.0)) fail("config: c must be > 0");
    pv.a = require_number(config, "a", "config");
    pv.b = require_number(config, "b", "config");
    pv.phis = parse_phis(config, "config");
    pv.eta_schedule = parse_eta_schedule(config, "config");
    job.payload = std::move(pv);
    return job;
  }
  if (experiment == "moments") {
    check_keys(config, {"experiment", "out", "model", "n", "replicates"}, "config");
    MomentsJob mom;
    mom.model = parse_model(require(config, "model", "config"), "model");
    mom.n = static_cast<Eigen::Index>(require_integer(config, "n", "config"));
    if (mom.n < 3) fail("config: n must be >= 3");
    mom.replicates = parse_replicates(config, "config");
    job.payload = std::move(mom);
    return job;
  }
  fail("config: unknown experiment '" + experiment +
       "' (valid: esd, clt, bilinear, cov, mp-solve, predict-variance, moments)");
}

Json model_to_json(const VectorModel& model) {
  Json j;
  switch (model.kind) {
    case VectorModel::Kind::Sphere:
      j["kind"] = "sphere";
      break;
    case VectorModel::Kind::LpBall:
      j["kind"] = "lp";
      j["p"] = model.p;
      break;
    case VectorModel::Kind::IidEven:
      j["kind"] = "iid";
      switch (model.law) {
        case ComponentLaw::Gaussian: j["law"] = "gaussian"; break;
        case ComponentLaw::Rademacher: j["law"] = "rademacher"; break;
        case ComponentLaw::UniformSym: j["law"] = "uniform"; break;
        case ComponentLaw::StudentLikeBounded: j["law"] = "student"; break;
      }
      break;
  }
  return j;
}

Json taus_to_json(const TauSpec& taus) {
  Json j;
  switch (taus.kind()) {
    case TauKind::Constant:
      j["kind"] = "constant";
      j["value"] = taus.value();
      break;
    case TauKind::ExplicitList:
      j["kind"] = "list";
      j["values"] = taus.values();
      break;
    case TauKind::DiscreteMeasure: {
      j["kind"] = "discrete";
      Json atoms = Json::array();
      for (const auto& a : taus.atoms()) atoms.push_back(Json::array({a.value, a.mass}));
      j["atoms"] = std::move(atoms);
      break;
    }
  }
  return j;
}

Json phi_to_json(const TestFunction& phi) {
  Json j;
  const auto& p = phi.params();
  switch (phi.kind()) {
    case TestFunction::Kind::GaussianBump:
      j["kind"] = "gaussian-bump";
      j["center"] = p.center;
      j["width"] = p.width;
      break;
    case TestFunction::Kind::PoissonIndicator:
      j["kind"] = "poisson-indicator";
      j["lo"] = p.lo;
      j["hi"] = p.hi;
      j["eta"] = p.eta;
      break;
    case TestFunction::Kind::Cauchy:
      j["kind"] = "cauchy";
      j["center"] = p.center;
      j["scale"] = p.width;
      break;
    case TestFunction::Kind::Monomial:
      j["kind"] = "monomial";
      j["degree"] = p.degree;
      if (p.tapered) {
        j["window"] = Json::array({p.lo, p.hi});
      } else {
        j["window"] = nullptr;
      }
      break;
    case TestFunction::Kind::Custom:
      j["kind"] = "custom";
      j["name"] = phi.name();
      break;
  }
  return j;
}

Json ensemble_to_json(const EnsembleConfig& config) {
  Json j;
  j["n"] = config.n;
  j["k"] = config.k;
  j["m"] = config.m;
  if (config.c_target > 0.0) j["c"] = config.c_target;
  j["model"] = model_to_json(config.model);
  j["taus"] = taus_to_json(config.taus);
  j["seed"] = config.master_seed;
  return j;
}

Json job_to_json(const Job& job) {
  Json j;
  j["experiment"] = job.experiment;
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, EsdJob>) {
          j["ensemble"] = ensemble_to_json(payload.ensemble);
          j["replicates"] = payload.replicates;
          j["histogram_bins"] = payload.histogram_bins;
          j["dump_spectra"] = payload.dump_spectra;
        } else if constexpr (std::is_same_v<T, CltJob>) {
          j["ensemble"] = ensemble_to_json(payload.ensemble);
          j["replicates"] = payload.replicates;
          Json phis = Json::array();
          for (const auto& phi : payload.phis) phis.push_back(phi_to_json(phi));
          j["phis"] = std::move(phis);
        } else if constexpr (std::is_same_v<T, BilinearJob>) {
          j["model"] = model_to_json(payload.model);
          j["n"] = payload.n;
          j["replicates"] = payload.replicates;
          Json h;
          h["kind"] = payload.h.kind == HSpec::Kind::Identity ? "identity" : "resolvent";
          if (payload.h.kind == HSpec::Kind::Resolvent) {
            h["z"] = Json::array({payload.h.z.real(), payload.h.z.imag()});
            h["ensemble"] = ensemble_to_json(*payload.h.ensemble);
          }
          j["h"] = std::move(h);
          j["seed"] = payload.seed;
        } else if constexpr (std::is_same_v<T, CovJob>) {
          j["ensemble"] = ensemble_to_json(payload.ensemble);
          j["replicates"] = payload.replicates;
          Json probes = Json::array();
          for (const auto& p : payload.probes) {
            probes.push_back(Json::array({Json::array({p[0].real(), p[0].imag()}),
                                          Json::array({p[1].real(), p[1].imag()})}));
          }
          j["probes"] = std::move(probes);
        } else if constexpr (std::is_same_v<T, MpSolveJob>) {
          j["taus"] = taus_to_json(payload.taus);
          j["c"] = payload.c;
          Json grid = Json::array();
          for (const Complex& z : payload.grid) {
            grid.push_back(Json::array({z.real(), z.imag()}));
          }
          j["grid"] = std::move(grid);
          j["with_density"] = payload.with_density;
          if (payload.with_density) j["density_points"] = payload.density_points;
          if (!payload.eta_schedule.empty()) j["eta_schedule"] = payload.eta_schedule;
        } else if constexpr (std::is_same_v<T, PredictVarianceJob>) {
          j["taus"] = taus_to_json(payload.taus);
          j["c"] = payload.c;
          j["a"] = payload.a;
          j["b"] = payload.b;
          Json phis = Json::array();
          for (const auto& phi : payload.phis) phis.push_back(phi_to_json(phi));
          j["phis"] = std::move(phis);
          if (!payload.eta_schedule.empty()) j["eta_schedule"] = payload.eta_schedule;
        } else if constexpr (std::is_same_v<T, MomentsJob>) {
          j["model"] = model_to_json(payload.model);
          j["n"] = payload.n;
          j["replicates"] = payload.replicates;
        }
      },
      job.payload);
  return j;
}

}  // namespace tensormp
