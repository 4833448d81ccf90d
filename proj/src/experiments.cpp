#include "rfc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "rfc/geometry.hpp"
#include "rfc/groundstate.hpp"
#include "rfc/kernels.hpp"
#include "rfc/maxflow.hpp"
#include "rfc/noise.hpp"
#include "rfc/oracle.hpp"
#include "rfc/parallel.hpp"
#include "rfc/records.hpp"
#include "rfc/rng.hpp"
#include "rfc/stats.hpp"
#include "rfc/weaknorm.hpp"

namespace rfc {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Counter-based local stream: independent draws indexed by an advancing
// counter, so sample functions stay pure in (key, draw index).
struct Stream {
  std::uint64_t key;
  std::uint64_t ctr = 0;
  double u() { return rng_uniform(key, ctr++); }
  double gauss() {
    const double u1 = u(), u2 = u();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
};

// --------------------------------------------------------------------------
// Config parsing

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [k, v] : obj.items())
    if (!allowed.contains(k)) fail(path + "." + k, "unknown key");
}

double get_num(const json& p, const std::string& key, double def, double lo,
               double hi) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number()) fail("params." + key, "expected a number");
  const double v = p[key].get<double>();
  if (v < lo || v > hi)
    fail("params." + key,
         "out of range [" + fmt(lo) + ", " + fmt(hi) + "]");
  return v;
}

int get_int(const json& p, const std::string& key, int def, int lo, int hi) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number_integer())
    fail("params." + key, "expected an integer");
  const int v = p[key].get<int>();
  if (v < lo || v > hi) fail("params." + key, "out of range");
  return v;
}

std::string get_str(const json& p, const std::string& key,
                    const std::string& def,
                    const std::set<std::string>& allowed) {
  if (!p.contains(key)) return def;
  if (!p[key].is_string()) fail("params." + key, "expected a string");
  const std::string v = p[key].get<std::string>();
  if (!allowed.contains(v)) fail("params." + key, "unsupported value " + v);
  return v;
}

std::vector<double> get_list(const json& p, const std::string& key,
                             std::vector<double> def, double lo, double hi) {
  if (!p.contains(key)) return def;
  if (!p[key].is_array() || p[key].empty())
    fail("params." + key, "expected a nonempty array");
  std::vector<double> out;
  for (const auto& v : p[key]) {
    if (!v.is_number()) fail("params." + key, "expected numbers");
    const double x = v.get<double>();
    if (x < lo || x > hi) fail("params." + key, "value out of range");
    out.push_back(x);
  }
  return out;
}

NoiseKind parse_kind(const std::string& s) {
  return s == "regularized" ? NoiseKind::RegularizedWN
                            : NoiseKind::DiscretizedWN;
}

NoiseField sample_noise(NoiseKind kind, int w, int h, std::uint64_t seed) {
  return kind == NoiseKind::DiscretizedWN ? sample_discretized_wn(w, h, seed)
                                          : sample_regularized_wn(w, h, seed);
}

// Dobrushin boundary data: +1 above the midline, -1 below, which forces a
// phase boundary across the box.
BoundaryCondition dobrushin(int L) {
  return BoundaryCondition::spins(
      [L](Cell c) { return c.y >= L / 2 ? +1 : -1; });
}

// One coupled plus/minus solve; 1 if the origin spin differs. Throws on a
// monotone-coupling violation.
int coupled_differ(double eps, int L, NoiseKind kind, std::uint64_t seed) {
  const NoiseField noise = sample_noise(kind, L, L, seed);
  const Stencil stencil = Stencil::make(StencilKind::Lattice4);
  const SpinField plus = ground_state(noise, eps, BoundaryCondition::plus(),
                                      stencil, EnergyMode::RFIM);
  const SpinField minus = ground_state(noise, eps, BoundaryCondition::minus(),
                                       stencil, EnergyMode::RFIM);
  for (std::size_t k = 0; k < plus.values.size(); ++k)
    if (plus.values[k] < minus.values[k])
      throw std::logic_error("monotone coupling violated");
  const Cell o = plus.origin();
  return plus.at(o.x, o.y) != minus.at(o.x, o.y) ? 1 : 0;
}

}  // namespace

// --------------------------------------------------------------------------
// Deterministic suites

LemmaSuiteResult run_lemma_suite(std::uint64_t seed, int n_height, int n_tilt,
                                 int n_argmin, int n_density) {
  LemmaSuiteResult res;

  // Height bound over (eta, |A-B|) cells, plus the closed-form isoceles case.
  {
    Stream rng{derive_key(seed, 0x48)};
    for (const double eta : {0.1, 0.25, 0.5, 1.0})
      for (const double ab : {1.0, 2.0, 5.0})
        for (int k = 0; k < n_height; ++k) {
          const Point A{0.0, 0.0}, B{ab, 0.0};
          const int inner = 1 + static_cast<int>(rng.u() * 4.0);
          std::vector<Point> straight, bent;
          straight.push_back(A);
          bent.push_back(A);
          for (int j = 1; j <= inner; ++j) {
            const double t = double(j) / (inner + 1);
            straight.push_back({t * ab, 0.0});
            bent.push_back({t * ab + (2.0 * rng.u() - 1.0) * ab,
                            (2.0 * rng.u() - 1.0) * ab});
          }
          straight.push_back(B);
          bent.push_back(B);

          const auto blend_len = [&](double t) {
            double len = 0.0;
            Point prev = A;
            for (std::size_t j = 1; j < bent.size(); ++j) {
              const Point p{(1.0 - t) * straight[j].x + t * bent[j].x,
                            (1.0 - t) * straight[j].y + t * bent[j].y};
              len += std::hypot(p.x - prev.x, p.y - prev.y);
              prev = p;
            }
            return len;
          };
          const double limit = (1.0 + eta) * ab;
          double lo = 0.0, hi = 1.0;
          if (blend_len(1.0) <= limit)
            lo = 1.0;
          else
            for (int it = 0; it < 50; ++it) {
              const double mid = (lo + hi) / 2;
              (blend_len(mid) <= limit ? lo : hi) = mid;
            }
          const double t = lo * 0.999;
          std::vector<Point> poly;
          for (std::size_t j = 0; j < bent.size(); ++j)
            poly.push_back({(1.0 - t) * straight[j].x + t * bent[j].x,
                            (1.0 - t) * straight[j].y + t * bent[j].y});

          const HeightBound hb = height_bound_check(A, B, eta, poly);
          ++res.height_checked;
          if (!hb.ok) ++res.height_failures;
        }

    const Point A{-1.0, 0.0}, B{1.0, 0.0};
    const std::vector<Point> iso = {A, {0.0, std::sqrt(5.0) / 2.0}, B};
    const HeightBound hb = height_bound_check(A, B, 0.5, iso);
    res.closed_form_h = hb.h;
    res.closed_form_bound = hb.bound;
    res.closed_form_ok =
        hb.ok && std::abs(hb.h - std::sqrt(5.0) / 2.0) < 1e-9;
  }

  // Normal tilt with C = 8.
  {
    Stream rng{derive_key(seed, 0x71)};
    long attempts = 0;
    while (res.tilt_checked < n_tilt && attempts < 40L * n_tilt) {
      ++attempts;
      const double theta = 2.0 * kPi * rng.u();
      const double off = (2.0 * rng.u() - 1.0) * 0.25;
      LineConfig a;
      a.nx = std::cos(theta);
      a.ny = std::sin(theta);
      a.anchor = {-off * a.nx, -off * a.ny};
      const double theta2 = theta + (2.0 * rng.u() - 1.0) * 0.12;
      const double off2 = off + (2.0 * rng.u() - 1.0) * 0.12;
      LineConfig b;
      b.nx = std::cos(theta2);
      b.ny = std::sin(theta2);
      b.anchor = {-off2 * b.nx, -off2 * b.ny};

      const TiltCheck tc = normal_tilt_check(a, b);
      if (tc.skipped) {
        ++res.tilt_skipped;
        continue;
      }
      ++res.tilt_checked;
      if (!tc.ok) ++res.tilt_failures;
    }
  }

  // Averaged-normal argmin identity on rasterized lines.
  {
    Stream rng{derive_key(seed, 0xA6)};
    const int L = 32;
    for (int k = 0; k < n_argmin; ++k) {
      const double theta = 2.0 * kPi * rng.u();
      const double off = (2.0 * rng.u() - 1.0) * 3.0;
      LineConfig line;
      line.nx = std::cos(theta);
      line.ny = std::sin(theta);
      line.anchor = {L / 2.0 + off * line.nx, L / 2.0 + off * line.ny};

      SpinField spin;
      spin.width = L;
      spin.height = L;
      spin.stencil = StencilKind::Lattice4;
      spin.values.resize(static_cast<std::size_t>(L) * L);
      for (int y = 0; y < L; ++y)
        for (int x = 0; x < L; ++x)
          spin.values[static_cast<std::size_t>(y) * L + x] =
              static_cast<std::int8_t>(line.value({x + 0.5, y + 0.5}));

      const Cell center{L / 2, L / 2};
      AveragedNormal nu;
      try {
        nu = averaged_normal(spin, {L / 2 + 0.5, L / 2 + 0.5}, 4.0);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (!nu.unique) continue;
      ++res.argmin_checked;
      const double at_nu = strong_excess(spin, nu.nx, nu.ny, center, 4.0);
      double grid_min = at_nu;
      for (int g = 0; g < 720; ++g) {
        const double phi = 2.0 * kPi * g / 720.0;
        grid_min = std::min(grid_min, strong_excess(spin, std::cos(phi),
                                                    std::sin(phi), center,
                                                    4.0));
      }
      if (at_nu > grid_min + 1e-9) ++res.argmin_failures;
    }
  }

  // Density estimates on Dobrushin ground states at eps = 0.05, L = 128.
  if (n_density > 0) {
    const int L = 128;
    const int n_fields = std::max(1, n_density / 100);
    const int per_field = (n_density + n_fields - 1) / n_fields;
    const Stencil stencil = Stencil::make(StencilKind::Lattice4);
    for (int f = 0; f < n_fields && res.density_checked < n_density; ++f) {
      const std::uint64_t fseed = derive_key(derive_key(seed, 0xDE), f);
      const NoiseField noise =
          sample_discretized_wn(L, L, derive_key(fseed, 0));
      const SpinField spin = ground_state(noise, 0.05, dobrushin(L), stencil,
                                          EnergyMode::ContinuumBV);
      const double eta = eta_audit(spin, spin.origin(), L / 3.0, 20, fseed);
      const BoundaryCurve curve = extract_jump_set(spin);

      std::vector<Point> candidates;
      for (const JumpEdge& e : curve.edges) {
        const Point m = e.mid();
        if (std::hypot(m.x - L / 2.0, m.y - L / 2.0) <= L / 4.0)
          candidates.push_back(m);
      }
      if (candidates.empty()) continue;
      Stream rng{derive_key(fseed, 1)};
      for (int k = 0; k < per_field && res.density_checked < n_density; ++k) {
        const Point m =
            candidates[static_cast<std::size_t>(rng.u() *
                                                candidates.size()) %
                       candidates.size()];
        const JumpEdge* edge = nullptr;
        for (const JumpEdge& e : curve.edges)
          if (e.mid().x == m.x && e.mid().y == m.y) {
            edge = &e;
            break;
          }
        const Cell x{
            static_cast<int>(std::floor(m.x + 0.45 * edge->nx - 0.5)),
            static_cast<int>(std::floor(m.y + 0.45 * edge->ny - 0.5))};
        const double r = 2.0 + rng.u() * (L / 4.0 - 2.0);
        const DensityCheck dc = density_check(spin, x, r, eta);
        ++res.density_checked;
        if (!(dc.on_jump_set && dc.vol_lo && dc.vol_hi && dc.per_lo &&
              dc.per_hi))
          ++res.density_failures;
      }
    }
  }
  return res;
}

OracleSuiteResult run_oracle_suite(std::uint64_t seed, int n_ground, int n_sr,
                                   int n_perimeter) {
  OracleSuiteResult res;
  const StencilKind stencils[] = {StencilKind::Lattice4, StencilKind::Crofton8,
                                  StencilKind::Crofton16};

  for (int i = 0; i < n_ground; ++i) {
    const std::uint64_t s = derive_key(derive_key(seed, 0x6E), i);
    const NoiseField noise = sample_discretized_wn(4, 4, s);
    const double eps = (i % 3 == 0) ? 0.1 : (i % 3 == 1 ? 1.0 : 10.0);
    const BoundaryCondition bc =
        i % 2 ? BoundaryCondition::minus() : BoundaryCondition::plus();
    const EnergyMode mode =
        (i / 2) % 2 ? EnergyMode::ContinuumBV : EnergyMode::RFIM;
    const Stencil stencil = Stencil::make(stencils[i % 3]);
    const SpinField spin = ground_state(noise, eps, bc, stencil, mode);
    const auto exact =
        oracle::enumerate_ground_state(noise, eps, bc, stencil, mode);
    res.max_energy_diff = std::max(res.max_energy_diff,
                                   std::abs(spin.energy - exact.min_energy));
    ++res.ground_checked;
  }

  for (int i = 0; i < n_sr; ++i) {
    const std::uint64_t s = derive_key(derive_key(seed, 0x57), i);
    const NoiseField noise = sample_discretized_wn(7, 7, s);
    const double r = 1.0 + 0.5 * (i % 3);
    const Stencil stencil = Stencil::make(stencils[i % 3]);
    const Cell center{3, 3};
    const WeakNormResult w = s_r(noise, r, center, stencil);
    const std::vector<Cell> cells = ball_cells(center, r);
    const auto exact = oracle::enumerate_sr(noise, cells, stencil);
    res.max_sr_diff = std::max(res.max_sr_diff,
                               std::abs(w.value - exact.value));
    ++res.sr_checked;
  }

  for (int i = 0; i < n_perimeter; ++i) {
    const std::uint64_t s = derive_key(derive_key(seed, 0x70), i);
    std::vector<std::int8_t> values(64);
    for (int k = 0; k < 64; ++k)
      values[k] = rng_uniform(s, k) < 0.5 ? -1 : +1;
    const Cell center{3 + i % 2, 3 + (i / 2) % 2};
    const std::vector<Cell> region = ball_cells(center, 1.5);
    const BoundaryCondition bc =
        i % 2 ? BoundaryCondition::free() : BoundaryCondition::plus();
    const Stencil stencil = Stencil::make(stencils[i % 3]);
    const double solved =
        constrained_minimize(values, 8, 8, region, nullptr, 0.0, bc, stencil,
                             PairWeighting::PerimeterOnly)
            .energy;
    const double exact = oracle::enumerate_constrained_perimeter(
        values, 8, 8, region, bc, stencil);
    res.max_perimeter_diff =
        std::max(res.max_perimeter_diff, std::abs(solved - exact));
    ++res.perimeter_checked;
  }

  res.ok = res.max_energy_diff <= 1e-9 && res.max_sr_diff <= 1e-9 &&
           res.max_perimeter_diff <= 1e-9;
  return res;
}

// --------------------------------------------------------------------------
// Experiment definitions

namespace {

struct ExperimentDef {
  int total = 0;
  // Fills params and scalars for sample `idx` with derived seed `seed`.
  std::function<void(int, std::uint64_t, ExperimentRecord&)> sample;
  // Builds the human summary; may lower the exit code to 1.
  std::function<std::string(const std::vector<ExperimentRecord>&, int&)>
      summarize;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

// Groups scalar `key` by parameter `param` (numeric), in grid order.
std::vector<std::pair<double, std::vector<double>>> group_by_param(
    const std::vector<ExperimentRecord>& recs, const std::string& param,
    const std::string& key) {
  std::vector<std::pair<double, std::vector<double>>> groups;
  for (const ExperimentRecord& r : recs) {
    const auto pit = r.params.find(param);
    const auto sit = r.scalars.find(key);
    if (pit == r.params.end() || sit == r.scalars.end()) continue;
    const double p = std::stod(pit->second);
    auto git = std::find_if(groups.begin(), groups.end(),
                            [&](const auto& g) { return g.first == p; });
    if (git == groups.end()) {
      groups.push_back({p, {}});
      git = groups.end() - 1;
    }
    git->second.push_back(sit->second);
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return groups;
}

ExperimentDef make_def(const std::string& name, const json& params) {
  ExperimentDef def;

  if (name == "noise-check") {
    check_keys(params, "params", {"kind", "L", "n_samples"});
    const NoiseKind kind =
        parse_kind(get_str(params, "kind", "discretized",
                           {"discretized", "regularized"}));
    const int L = get_int(params, "L", 64, 2, 4096);
    def.total = get_int(params, "n_samples", 200, 1, 1000000);
    def.sample = [kind, L](int, std::uint64_t seed, ExperimentRecord& rec) {
      const NoiseField noise = sample_noise(kind, L, L, seed);
      rec.params["kind"] =
          kind == NoiseKind::DiscretizedWN ? "discretized" : "regularized";
      rec.params["L"] = std::to_string(L);
      const double n = static_cast<double>(noise.values.size());
      const double mean = kernels::sum(noise.values) / n;
      rec.scalars["mean"] = mean;
      rec.scalars["variance"] =
          kernels::sum_sq(noise.values) / n - mean * mean;
      rec.scalars["sup_abs"] = kernels::max_abs(noise.values);
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs, int&) {
      std::vector<double> vars;
      for (const auto& r : recs) vars.push_back(r.scalars.at("variance"));
      std::ostringstream out;
      out << "noise-check: samples=" << recs.size()
          << " mean_variance=" << fmt(mean_of(vars)) << "\n";
      return out.str();
    };
    return def;
  }

  if (name == "ml-sweep") {
    check_keys(params, "params", {"eps_list", "L", "n_samples", "kind"});
    const auto eps_list =
        get_list(params, "eps_list", {0.25, 0.5, 1.0, 2.0, 4.0}, 0.0, 1e6);
    const int L = get_int(params, "L", 32, 2, 1024);
    const int n = get_int(params, "n_samples", 500, 1, 1000000);
    const NoiseKind kind =
        parse_kind(get_str(params, "kind", "discretized",
                           {"discretized", "regularized"}));
    def.total = static_cast<int>(eps_list.size()) * n;
    def.sample = [eps_list, L, n, kind](int idx, std::uint64_t seed,
                                        ExperimentRecord& rec) {
      const double eps = eps_list[idx / n];
      rec.params["eps"] = fmt(eps);
      rec.params["L"] = std::to_string(L);
      rec.scalars["differ"] = coupled_differ(eps, L, kind, seed);
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      std::ostringstream out;
      out << "ml-sweep:\n";
      double prev_m = 2.0, prev_se = 0.0;
      bool monotone = true;
      for (const auto& [eps, vals] : group_by_param(recs, "eps", "differ")) {
        const double m = mean_of(vals);
        const double se = std::sqrt(m * (1.0 - m) / vals.size());
        out << "  eps=" << fmt(eps) << " m_hat=" << fmt(m)
            << " se=" << fmt(se) << " n=" << vals.size() << "\n";
        if (m > prev_m + 2.0 * (se + prev_se)) monotone = false;
        prev_m = m;
        prev_se = se;
      }
      out << "  monotone_within_2se=" << (monotone ? "yes" : "no") << "\n";
      if (!monotone) exit_code = 1;
      return out.str();
    };
    return def;
  }

  if (name == "lstar") {
    check_keys(params, "params", {"eps", "p0", "L_grid", "n_samples"});
    const double eps = get_num(params, "eps", 4.0, 0.0, 1e6);
    const double p0 = get_num(params, "p0", 0.5, 0.0, 1.0);
    const auto L_grid =
        get_list(params, "L_grid", {4.0, 8.0, 16.0, 32.0}, 2.0, 1024.0);
    const int n = get_int(params, "n_samples", 200, 1, 1000000);
    def.total = static_cast<int>(L_grid.size()) * n;
    def.sample = [L_grid, eps, n](int idx, std::uint64_t seed,
                                  ExperimentRecord& rec) {
      const int L = static_cast<int>(L_grid[idx / n]);
      rec.params["L"] = std::to_string(L);
      rec.params["eps"] = fmt(eps);
      rec.scalars["differ"] =
          coupled_differ(eps, L, NoiseKind::DiscretizedWN, seed);
    };
    def.summarize = [p0](const std::vector<ExperimentRecord>& recs, int&) {
      std::ostringstream out;
      out << "lstar:\n";
      int l_star = -1;
      for (const auto& [L, vals] : group_by_param(recs, "L", "differ")) {
        const double m = mean_of(vals);
        const double se = std::sqrt(m * (1.0 - m) / vals.size());
        out << "  L=" << L << " m_hat=" << fmt(m) << " se=" << fmt(se)
            << "\n";
        if (l_star < 0 && m + 2.0 * se < p0) l_star = static_cast<int>(L);
      }
      out << "  L_star=" << l_star << " (p0=" << fmt(p0)
          << "; -1 = not reached)\n";
      return out.str();
    };
    return def;
  }

  if (name == "sr-scaling") {
    check_keys(params, "params", {"R_list", "n_samples", "kind"});
    const auto R_list =
        get_list(params, "R_list", {8, 16, 32, 64, 128}, 2.0, 4096.0);
    const int n = get_int(params, "n_samples", 500, 2, 1000000);
    const NoiseKind kind =
        parse_kind(get_str(params, "kind", "discretized",
                           {"discretized", "regularized"}));
    def.total = static_cast<int>(R_list.size()) * n;
    def.sample = [R_list, n, kind](int idx, std::uint64_t seed,
                                   ExperimentRecord& rec) {
      const double R = R_list[idx / n];
      const int L = 2 * static_cast<int>(std::ceil(R)) + 3;
      const NoiseField noise = sample_noise(kind, L, L, seed);
      const Cell center{noise.origin_x, noise.origin_y};
      const Stencil stencil = Stencil::make(StencilKind::Lattice4);
      WeakNormWarmStart warm;
      for (int r = 2; r < R; r *= 2) s_r_warm(noise, r, center, stencil, warm);
      rec.params["R"] = fmt(R);
      rec.scalars["sr"] = s_r_warm(noise, R, center, stencil, warm).value;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs, int&) {
      std::ostringstream out;
      out << "sr-scaling:\n";
      std::vector<std::pair<double, double>> fit_pts;
      double lo = 0.0, hi = 0.0;
      bool first = true;
      for (const auto& [R, vals] : group_by_param(recs, "R", "sr")) {
        const double m = mean_of(vals);
        const double norm = m / std::pow(std::log(R), 0.75);
        out << "  R=" << R << " mean=" << fmt(m)
            << " normalized=" << fmt(norm) << "\n";
        if (first || norm < lo) lo = norm;
        if (first || norm > hi) hi = norm;
        first = false;
        if (R >= 3.0 && m > 0.0) fit_pts.emplace_back(R, m);
      }
      if (!first && lo > 0.0)
        out << "  normalized_spread_factor=" << fmt(hi / lo) << "\n";
      if (fit_pts.size() >= 3) {
        const ScalingFit fit = fit_log_power(fit_pts);
        out << "  fit: a=" << fmt(fit.prefactor) << " b=" << fmt(fit.exponent)
            << " residual=" << fmt(fit.residual) << "\n";
      }
      return out.str();
    };
    return def;
  }

  if (name == "sr-tails") {
    check_keys(params, "params", {"R", "n_samples", "kind"});
    const double R = get_num(params, "R", 32.0, 2.0, 4096.0);
    const int n = get_int(params, "n_samples", 2000, 100, 1000000);
    const NoiseKind kind =
        parse_kind(get_str(params, "kind", "discretized",
                           {"discretized", "regularized"}));
    def.total = n;
    def.sample = [R, kind](int, std::uint64_t seed, ExperimentRecord& rec) {
      const int L = 2 * static_cast<int>(std::ceil(R)) + 3;
      const NoiseField noise = sample_noise(kind, L, L, seed);
      const Cell center{noise.origin_x, noise.origin_y};
      const Stencil stencil = Stencil::make(StencilKind::Lattice4);
      WeakNormWarmStart warm;
      for (int r = 2; r < R; r *= 2) s_r_warm(noise, r, center, stencil, warm);
      rec.params["R"] = fmt(R);
      rec.scalars["sr"] = s_r_warm(noise, R, center, stencil, warm).value;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      std::vector<double> samples;
      for (const auto& r : recs) samples.push_back(r.scalars.at("sr"));
      const std::vector<double> t_grid = {0.5, 1.0, 1.5, 2.0, 3.0};
      const EnvelopeCheck ec =
          subgaussian_envelope_check(samples, 4.0 * kPi, t_grid);
      std::ostringstream out;
      out << "sr-tails: samples=" << samples.size()
          << " envelope_ok=" << (ec.ok ? "yes" : "no")
          << " max_violation=" << fmt(ec.max_violation) << "\n";
      if (!ec.ok) exit_code = 1;
      return out.str();
    };
    return def;
  }

  if (name == "pinned-sup") {
    check_keys(params, "params", {"R_max", "W", "n_samples", "kind"});
    const int R_max = get_int(params, "R_max", 64, 2, 1024);
    const int W = get_int(params, "W", 16, 0, 256);
    const int n = get_int(params, "n_samples", 200, 1, 1000000);
    const NoiseKind kind =
        parse_kind(get_str(params, "kind", "discretized",
                           {"discretized", "regularized"}));
    def.total = n;
    def.sample = [R_max, W, kind](int, std::uint64_t seed,
                                  ExperimentRecord& rec) {
      int top = 2;
      while (top * 2 <= R_max) top *= 2;
      const int L = 2 * (W + top) + 3;
      const NoiseField noise = sample_noise(kind, L, L, seed);
      const Cell center{noise.origin_x, noise.origin_y};
      const Stencil stencil = Stencil::make(StencilKind::Lattice4);
      const PinnedScales scales =
          pinned_sup_scales(noise, center, R_max, stencil);
      const PinnedSpace space = pinned_sup_space(noise, R_max, W, stencil);
      rec.params["R_max"] = std::to_string(R_max);
      rec.params["W"] = std::to_string(W);
      rec.scalars["pinned_scales"] = scales.value;
      rec.scalars["pinned_space"] = space.value;
      rec.scalars["sr_single"] = scales.per_scale.back().second;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      std::vector<double> scales, space, single;
      for (const auto& r : recs) {
        scales.push_back(r.scalars.at("pinned_scales"));
        space.push_back(r.scalars.at("pinned_space"));
        single.push_back(r.scalars.at("sr_single"));
      }
      std::ostringstream out;
      out << "pinned-sup: samples=" << recs.size()
          << " mean_scales=" << fmt(mean_of(scales))
          << " mean_space=" << fmt(mean_of(space))
          << " mean_single_scale=" << fmt(mean_of(single)) << "\n";
      if (space.size() >= 100) {
        const std::vector<double> t_grid = {0.5, 1.0, 1.5, 2.0, 3.0};
        const EnvelopeCheck ec =
            subgaussian_envelope_check(space, 4.0 * kPi, t_grid);
        out << "  envelope_ok=" << (ec.ok ? "yes" : "no") << "\n";
        if (!ec.ok) exit_code = 1;
      }
      return out.str();
    };
    return def;
  }

  if (name == "geometry-suite") {
    check_keys(params, "params", {"eps", "L", "n_samples"});
    const double eps = get_num(params, "eps", 0.05, 0.0, 1e6);
    const int L = get_int(params, "L", 128, 16, 1024);
    def.total = get_int(params, "n_samples", 20, 1, 100000);
    def.sample = [eps, L](int, std::uint64_t seed, ExperimentRecord& rec) {
      const NoiseField noise = sample_discretized_wn(L, L, seed);
      const Stencil stencil = Stencil::make(StencilKind::Lattice4);
      const SpinField spin = ground_state(noise, eps, dobrushin(L), stencil,
                                          EnergyMode::ContinuumBV);
      const Cell center = spin.origin();
      const double R = L / 3.0;

      const BoundaryCurve curve = extract_jump_set(spin);
      const BestLine fit = best_line_fit(spin, center, R, 64, 64);
      const FewJumps fj = few_jumps_radius(spin, fit.line, center, R);
      double tilt = -1.0, excess_out = -1.0;
      if (fj.found && fj.crossings == 2) {
        const CampanatoStep step = campanato_step(spin, center, R, fit.line);
        tilt = step.tilt;
        excess_out = step.excess_out;
      }
      const double eta = eta_audit(spin, center, R, 20, seed);
      const auto bubbles =
          bubble_detect(spin, center, L / 2.0 - 1.0, &noise, eps);
      int bad_bubbles = 0;
      for (const Bubble& b : bubbles)
        if (!b.energy_ok) ++bad_bubbles;

      rec.params["eps"] = fmt(eps);
      rec.params["L"] = std::to_string(L);
      rec.scalars["energy"] = spin.energy;
      rec.scalars["n_components"] =
          static_cast<double>(curve.components.size());
      rec.scalars["total_length"] = curve.total_lattice4;
      rec.scalars["l1_excess"] = fit.excess.l1;
      rec.scalars["few_found"] = fj.found ? 1.0 : 0.0;
      rec.scalars["crossings"] = fj.found ? fj.crossings : -1.0;
      rec.scalars["tilt"] = tilt;
      rec.scalars["excess_out"] = excess_out;
      rec.scalars["eta_hat"] = eta;
      rec.scalars["n_bubbles"] = static_cast<double>(bubbles.size());
      rec.scalars["bubble_violations"] = bad_bubbles;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      double bad = 0.0;
      std::vector<double> etas, excesses;
      for (const auto& r : recs) {
        bad += r.scalars.at("bubble_violations");
        etas.push_back(r.scalars.at("eta_hat"));
        excesses.push_back(r.scalars.at("l1_excess"));
      }
      std::ostringstream out;
      out << "geometry-suite: samples=" << recs.size()
          << " mean_eta_hat=" << fmt(mean_of(etas))
          << " mean_l1_excess=" << fmt(mean_of(excesses))
          << " bubble_violations=" << bad << "\n";
      if (bad > 0.0) exit_code = 1;
      return out.str();
    };
    return def;
  }

  if (name == "lemma-suite") {
    check_keys(params, "params",
               {"n_height", "n_tilt", "n_argmin", "n_density"});
    const int nh = get_int(params, "n_height", 10000, 1, 10000000);
    const int nt = get_int(params, "n_tilt", 10000, 1, 10000000);
    const int na = get_int(params, "n_argmin", 100, 1, 100000);
    const int nd = get_int(params, "n_density", 1000, 0, 1000000);
    def.total = 1;
    def.sample = [nh, nt, na, nd](int, std::uint64_t seed,
                                  ExperimentRecord& rec) {
      const LemmaSuiteResult r = run_lemma_suite(seed, nh, nt, na, nd);
      rec.scalars["height_checked"] = r.height_checked;
      rec.scalars["height_failures"] = r.height_failures;
      rec.scalars["tilt_checked"] = r.tilt_checked;
      rec.scalars["tilt_failures"] = r.tilt_failures;
      rec.scalars["argmin_checked"] = r.argmin_checked;
      rec.scalars["argmin_failures"] = r.argmin_failures;
      rec.scalars["density_checked"] = r.density_checked;
      rec.scalars["density_failures"] = r.density_failures;
      rec.scalars["closed_form_ok"] = r.closed_form_ok ? 1.0 : 0.0;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      double failures = 0.0;
      for (const auto& r : recs)
        failures += r.scalars.at("height_failures") +
                    r.scalars.at("tilt_failures") +
                    r.scalars.at("argmin_failures") +
                    r.scalars.at("density_failures") +
                    (1.0 - r.scalars.at("closed_form_ok"));
      std::ostringstream out;
      out << "lemma-suite: total_failures=" << failures << "\n";
      if (failures > 0.0) exit_code = 1;
      return out.str();
    };
    return def;
  }

  if (name == "oracle-suite") {
    check_keys(params, "params", {"n_ground", "n_sr", "n_perimeter"});
    const int ng = get_int(params, "n_ground", 100, 1, 1000000);
    const int ns = get_int(params, "n_sr", 100, 1, 1000000);
    const int np = get_int(params, "n_perimeter", 200, 1, 1000000);
    def.total = 1;
    def.sample = [ng, ns, np](int, std::uint64_t seed,
                              ExperimentRecord& rec) {
      const OracleSuiteResult r = run_oracle_suite(seed, ng, ns, np);
      rec.scalars["ground_checked"] = r.ground_checked;
      rec.scalars["sr_checked"] = r.sr_checked;
      rec.scalars["perimeter_checked"] = r.perimeter_checked;
      rec.scalars["max_energy_diff"] = r.max_energy_diff;
      rec.scalars["max_sr_diff"] = r.max_sr_diff;
      rec.scalars["max_perimeter_diff"] = r.max_perimeter_diff;
    };
    def.summarize = [](const std::vector<ExperimentRecord>& recs,
                       int& exit_code) {
      bool ok = true;
      for (const auto& r : recs)
        ok = ok && r.scalars.at("max_energy_diff") <= 1e-9 &&
             r.scalars.at("max_sr_diff") <= 1e-9 &&
             r.scalars.at("max_perimeter_diff") <= 1e-9;
      std::ostringstream out;
      out << "oracle-suite: agreement=" << (ok ? "exact" : "VIOLATED")
          << "\n";
      if (!ok) exit_code = 1;
      return out.str();
    };
    return def;
  }

  fail("experiment", "unknown experiment " + name);
}

}  // namespace

// --------------------------------------------------------------------------
// Runner

RunOutcome run_experiment(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("config: cannot open " + config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(cfg, "",
             {"schema_version", "experiment", "master_seed", "output",
              "params"});
  if (!cfg.contains("schema_version") ||
      !cfg["schema_version"].is_number_integer() ||
      cfg["schema_version"].get<int>() != 1)
    fail("schema_version", "expected the integer 1");
  if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
    fail("experiment", "required string");
  const std::string name = cfg["experiment"].get<std::string>();
  std::uint64_t master_seed = 1;
  if (cfg.contains("master_seed")) {
    if (!cfg["master_seed"].is_number_unsigned() &&
        !cfg["master_seed"].is_number_integer())
      fail("master_seed", "expected a nonnegative integer");
    master_seed = cfg["master_seed"].get<std::uint64_t>();
  }
  const std::string output =
      cfg.contains("output") && cfg["output"].is_string()
          ? cfg["output"].get<std::string>()
          : name + ".records";
  const json params = cfg.contains("params") ? cfg["params"] : json::object();
  if (!params.is_object()) fail("params", "expected an object");

  const ExperimentDef def = make_def(name, params);
  const std::uint64_t stream = derive_key(master_seed, fnv1a(name));

  RunOutcome out;
  out.records_path = output;

  std::set<int> done;
  if (std::filesystem::exists(output))
    for (const ExperimentRecord& rec : load_records(output))
      if (rec.experiment == name && rec.master_seed == master_seed)
        done.insert(rec.sample_index);

  std::vector<int> todo;
  for (int i = 0; i < def.total; ++i)
    if (!done.contains(i))
      todo.push_back(i);
    else
      ++out.skipped;

  constexpr int kChunk = 64;
  for (std::size_t base = 0; base < todo.size(); base += kChunk) {
    const int count =
        static_cast<int>(std::min<std::size_t>(kChunk, todo.size() - base));
    std::vector<ExperimentRecord> chunk(count);
    parallel_for(count, [&](int k) {
      const int idx = todo[base + k];
      ExperimentRecord& rec = chunk[k];
      rec.experiment = name;
      rec.master_seed = master_seed;
      rec.sample_index = idx;
      const auto t0 = std::chrono::steady_clock::now();
      def.sample(idx, derive_key(stream, idx), rec);
      rec.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    });
    for (const ExperimentRecord& rec : chunk) append_record(output, rec);
    out.written += count;
  }

  std::vector<ExperimentRecord> all;
  for (const ExperimentRecord& rec : load_records(output))
    if (rec.experiment == name && rec.master_seed == master_seed)
      all.push_back(rec);
  std::sort(all.begin(), all.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return a.sample_index < b.sample_index;
            });
  out.summary = def.summarize(all, out.exit_code);
  return out;
}

VerifyOutcome verify_records_file(const std::string& path) {
  VerifyOutcome out;
  std::ostringstream report;
  std::vector<ExperimentRecord> records;
  try {
    records = load_records(path);
  } catch (const std::exception& e) {
    out.report = std::string("verify: ") + e.what() + "\n";
    return out;
  }

  bool ok = true;
  std::set<std::string> identities;
  for (const ExperimentRecord& rec : records) {
    std::ostringstream id;
    id << rec.experiment << '|' << rec.master_seed << '|' << rec.sample_index;
    for (const auto& [k, v] : rec.params) id << '|' << k << '=' << v;
    if (!identities.insert(id.str()).second) {
      report << "duplicate record identity: " << id.str() << "\n";
      ok = false;
    }
    for (const auto& [k, v] : rec.scalars)
      if (!std::isfinite(v)) {
        report << "non-finite scalar " << k << " in sample "
               << rec.sample_index << "\n";
        ok = false;
      }
    if (rec.experiment == "oracle-suite")
      for (const char* k :
           {"max_energy_diff", "max_sr_diff", "max_perimeter_diff"}) {
        const auto it = rec.scalars.find(k);
        if (it != rec.scalars.end() && it->second > 1e-9) {
          report << "oracle disagreement: " << k << "=" << fmt(it->second)
                 << "\n";
          ok = false;
        }
      }
    if (rec.experiment == "lemma-suite")
      for (const char* k : {"height_failures", "tilt_failures",
                            "argmin_failures", "density_failures"}) {
        const auto it = rec.scalars.find(k);
        if (it != rec.scalars.end() && it->second > 0.0) {
          report << "lemma failure: " << k << "=" << fmt(it->second) << "\n";
          ok = false;
        }
      }
  }
  report << "verify: " << records.size() << " records, "
         << (ok ? "all invariants passed" : "violations found") << "\n";
  out.ok = ok;
  out.report = report.str();
  return out;
}

}  // namespace rfc
