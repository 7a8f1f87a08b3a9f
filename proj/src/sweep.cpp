#include "optomech/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "optomech/error.hpp"

namespace optomech {

namespace {

void fill_outputs(SweepRecord& r) {
  const SteadyState& ss = *r.state;
  if (!ss.stable) return;
  try {
    const DriftMatrix a = drift_matrix(ss, r.params);
    const double n = phase_noise_N(a, std::abs(ss.alpha), r.noise);
    r.phase_noise = n;
    r.negative_noise = n < 0;
    const DiffusionMatrix d = diffusion_matrix(r.params, *r.derived, n, true);
    r.covariance = solve_lyapunov(a, d);
    r.phonons = phonon_number(r.covariance->v);
    r.limits = phonon_asymptotic(r.params, ss, r.noise, n);
    r.entanglement = log_negativity(r.covariance->v);
  } catch (const Error& e) {
    r.error = e.what();
  }
}

SweepRecord base_record(const SystemParams& params, const NoiseModel& noise,
                        std::size_t point_index) {
  SweepRecord r;
  r.point_index = point_index;
  r.params = params;
  r.noise = noise;
  return r;
}

struct GridPoint {
  SystemParams params;
  NoiseModel noise;
};

std::vector<GridPoint> expand_grid(const SweepConfig& cfg) {
  std::vector<GridPoint> grid;
  const auto apply = [](GridPoint& g, const Axis& axis, double v) {
    assign_physical(g.params, g.noise, axis.key, v);
  };
  if (cfg.axes.empty()) {
    grid.push_back({cfg.base, cfg.noise});
    return grid;
  }
  const std::vector<double> outer = cfg.axes[0].values();
  const std::vector<double> inner =
      cfg.axes.size() > 1 ? cfg.axes[1].values() : std::vector<double>{};
  for (double u : outer) {
    GridPoint g{cfg.base, cfg.noise};
    apply(g, cfg.axes[0], u);
    if (inner.empty()) {
      grid.push_back(g);
      continue;
    }
    for (double v : inner) {
      GridPoint h = g;
      apply(h, cfg.axes[1], v);
      grid.push_back(h);
    }
  }
  return grid;
}

std::vector<SweepRecord> continuity_sweep(const std::vector<GridPoint>& grid) {
  std::vector<SweepRecord> out;
  out.reserve(2 * grid.size());
  BranchFollower follower;
  auto visit = [&](std::size_t i, const char* direction) {
    SweepRecord r = base_record(grid[i].params, grid[i].noise, i);
    r.direction = direction;
    try {
      r.derived = derive(r.params);
      const std::vector<SteadyState> branches = solve_branches(r.params, *r.derived);
      r.branch_count = static_cast<int>(branches.size());
      const int idx = follower.select(branches);
      if (idx < 0) {
        r.error = "no stable branch";
      } else {
        r.state = branches[idx];
        r.jumped = follower.jumped();
        fill_outputs(r);
      }
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < grid.size(); ++i) visit(i, "up");
  for (std::size_t i = grid.size(); i-- > 0;) visit(i, "down");
  return out;
}

}  // namespace

std::vector<SweepRecord> evaluate_point(const SystemParams& params, const NoiseModel& noise,
                                        BranchPolicy policy, std::size_t point_index) {
  std::vector<SweepRecord> out;
  SweepRecord head = base_record(params, noise, point_index);
  std::vector<SteadyState> branches;
  try {
    validate(noise);
    head.derived = derive(params);
    branches = solve_branches(params, *head.derived);
  } catch (const Error& e) {
    head.error = e.what();
    out.push_back(std::move(head));
    return out;
  }
  head.branch_count = static_cast<int>(branches.size());
  if (policy == BranchPolicy::lowest && branches.size() > 1) branches.resize(1);
  for (const SteadyState& ss : branches) {
    SweepRecord r = head;
    r.state = ss;
    fill_outputs(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  const std::vector<GridPoint> grid = expand_grid(cfg);
  if (cfg.policy == BranchPolicy::continuity) return continuity_sweep(grid);

  std::vector<std::vector<SweepRecord>> per_point(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      per_point[i] = evaluate_point(grid[i].params, grid[i].noise, cfg.policy, i);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, grid.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<SweepRecord> out;
  for (auto& recs : per_point) {
    for (auto& r : recs) out.push_back(std::move(r));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

template <class T>
Cell opt(const std::optional<T>& o, double (*f)(const T&)) {
  if (!o) return {};
  return f(*o);
}

Cell flag(bool b) { return static_cast<std::int64_t>(b ? 1 : 0); }

Cell cov(const SweepRecord& r, int i, int j) {
  if (!r.covariance) return {};
  return r.covariance->v(i, j);
}

}  // namespace

const std::vector<Column>& record_columns() {
  using R = SweepRecord;
  static const std::vector<Column> cols = {
      {"point", [](const R& r) -> Cell { return static_cast<std::int64_t>(r.point_index); }},
      {"branch",
       [](const R& r) -> Cell {
         if (!r.state) return {};
         return static_cast<std::int64_t>(r.state->branch_index);
       }},
      {"branch_count", [](const R& r) -> Cell { return static_cast<std::int64_t>(r.branch_count); }},
      {"direction",
       [](const R& r) -> Cell {
         if (r.direction.empty()) return {};
         return r.direction;
       }},
      {"input_power", [](const R& r) -> Cell { return r.params.input_power; }},
      {"detuning0", [](const R& r) -> Cell { return r.params.detuning; }},
      {"linewidth", [](const R& r) -> Cell { return r.noise.linewidth; }},
      {"correlation_rate", [](const R& r) -> Cell { return r.noise.correlation_rate; }},
      {"temperature", [](const R& r) -> Cell { return r.params.temperature; }},
      {"omega_m", [](const R& r) -> Cell { return r.params.mechanical_freq; }},
      {"gamma_m", [](const R& r) -> Cell { return r.params.mechanical_damping; }},
      {"kappa", [](const R& r) -> Cell { return r.params.cavity_decay; }},
      {"cavity_length", [](const R& r) -> Cell { return r.params.cavity_length; }},
      {"mirror_mass", [](const R& r) -> Cell { return r.params.mirror_mass; }},
      {"wavelength", [](const R& r) -> Cell { return r.params.laser_wavelength; }},
      {"G0", [](const R& r) { return opt<DerivedParams>(r.derived, [](const DerivedParams& d) { return d.single_photon_coupling; }); }},
      {"E", [](const R& r) { return opt<DerivedParams>(r.derived, [](const DerivedParams& d) { return d.drive_amplitude; }); }},
      {"nbar", [](const R& r) { return opt<DerivedParams>(r.derived, [](const DerivedParams& d) { return d.thermal_occupation; }); }},
      {"alpha_re", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.alpha.real(); }); }},
      {"alpha_im", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.alpha.imag(); }); }},
      {"photons", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.photons; }); }},
      {"q_s", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.q_s; }); }},
      {"delta", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.delta; }); }},
      {"delta_over_omega_m",
       [](const R& r) -> Cell {
         if (!r.state) return {};
         return r.state->delta / r.params.mechanical_freq;
       }},
      {"G", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.coupling; }); }},
      {"eta", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.eta; }); }},
      {"stable", [](const R& r) -> Cell { return r.state ? flag(r.state->stable) : Cell{}; }},
      {"tangent", [](const R& r) -> Cell { return r.state ? flag(r.state->tangent) : Cell{}; }},
      {"jumped", [](const R& r) -> Cell { return flag(r.jumped); }},
      {"max_re_eig", [](const R& r) { return opt<SteadyState>(r.state, [](const SteadyState& s) { return s.max_real_eig; }); }},
      {"N", [](const R& r) -> Cell { return r.phase_noise ? Cell{*r.phase_noise} : Cell{}; }},
      {"N_over_kappa",
       [](const R& r) -> Cell {
         if (!r.phase_noise) return {};
         return *r.phase_noise / r.params.cavity_decay;
       }},
      {"S_phidot_omega_m",
       [](const R& r) -> Cell {
         if (!(r.noise.correlation_rate > 0)) return {};
         return phase_noise_spectrum(r.params.mechanical_freq, r.noise);
       }},
      {"N_negative", [](const R& r) -> Cell { return r.phase_noise ? flag(r.negative_noise) : Cell{}; }},
      {"V11", [](const R& r) { return cov(r, 0, 0); }},
      {"V12", [](const R& r) { return cov(r, 0, 1); }},
      {"V13", [](const R& r) { return cov(r, 0, 2); }},
      {"V14", [](const R& r) { return cov(r, 0, 3); }},
      {"V22", [](const R& r) { return cov(r, 1, 1); }},
      {"V23", [](const R& r) { return cov(r, 1, 2); }},
      {"V24", [](const R& r) { return cov(r, 1, 3); }},
      {"V33", [](const R& r) { return cov(r, 2, 2); }},
      {"V34", [](const R& r) { return cov(r, 2, 3); }},
      {"V44", [](const R& r) { return cov(r, 3, 3); }},
      {"lyapunov_residual", [](const R& r) { return opt<CovarianceMatrix>(r.covariance, [](const CovarianceMatrix& c) { return c.residual; }); }},
      {"condition", [](const R& r) { return opt<CovarianceMatrix>(r.covariance, [](const CovarianceMatrix& c) { return c.condition; }); }},
      {"ill_conditioned", [](const R& r) -> Cell { return r.covariance ? flag(r.covariance->ill_conditioned) : Cell{}; }},
      {"phonons_raw", [](const R& r) { return opt<PhononNumber>(r.phonons, [](const PhononNumber& n) { return n.raw; }); }},
      {"phonons", [](const R& r) { return opt<PhononNumber>(r.phonons, [](const PhononNumber& n) { return n.value; }); }},
      {"phonons_limit_exact_N", [](const R& r) { return opt<PhononLimits>(r.limits, [](const PhononLimits& l) { return l.with_exact_noise; }); }},
      {"phonons_limit_sideband_N", [](const R& r) { return opt<PhononLimits>(r.limits, [](const PhononLimits& l) { return l.with_sideband_noise; }); }},
      {"phonons_limit_spectral", [](const R& r) { return opt<PhononLimits>(r.limits, [](const PhononLimits& l) { return l.spectral; }); }},
      {"log_negativity", [](const R& r) { return opt<EntanglementResult>(r.entanglement, [](const EntanglementResult& e) { return e.log_negativity; }); }},
      {"nu_min", [](const R& r) { return opt<EntanglementResult>(r.entanglement, [](const EntanglementResult& e) { return e.nu_min; }); }},
      {"sigma", [](const R& r) { return opt<EntanglementResult>(r.entanglement, [](const EntanglementResult& e) { return e.sigma; }); }},
      {"error",
       [](const R& r) -> Cell {
         if (r.error.empty()) return {};
         return r.error;
       }},
  };
  return cols;
}

namespace {

std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out + "\"";
}

std::string json_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(double v) const { return std::isfinite(v) ? format_double(v) : "null"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return json_string(s); }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

void emit(const std::vector<SweepRecord>& records, OutputFormat format, std::ostream& out) {
  const auto& cols = record_columns();
  if (format == OutputFormat::csv) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
    out << '\n';
    for (const SweepRecord& r : records) {
      for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_field(cols[i].get(r));
      out << '\n';
    }
    return;
  }
  out << '[';
  for (std::size_t k = 0; k < records.size(); ++k) {
    out << (k ? ",\n" : "\n") << '{';
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << json_string(cols[i].name) << ':' << json_field(cols[i].get(records[k]));
    }
    out << '}';
  }
  out << (records.empty() ? "]\n" : "\n]\n");
}

namespace {

template <class Writer>
void write_to(const std::string& path, Writer&& writer) {
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    if (!std::cout) fail(ErrorCode::io, "failed writing to stdout");
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  writer(file);
  file.flush();
  if (!file) fail(ErrorCode::io, "failed writing '" + path + "'");
}

}  // namespace

void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::string& path) {
  write_to(path, [&](std::ostream& out) { emit(records, format, out); });
}

double Raster::eta_center(std::size_t i) const {
  return eta_lo + (static_cast<double>(i) + 0.5) * (eta_hi - eta_lo) / static_cast<double>(eta_bins);
}

double Raster::detuning_center(std::size_t j) const {
  return detuning_lo + (static_cast<double>(j) + 0.5) * (detuning_hi - detuning_lo) /
                           static_cast<double>(detuning_bins);
}

Raster fig3_regrid(const std::vector<SweepRecord>& records, std::size_t eta_bins,
                   std::size_t detuning_bins,
                   std::optional<std::pair<double, double>> detuning_range) {
  if (eta_bins == 0 || detuning_bins == 0) fail(ErrorCode::domain, "raster needs at least one bin");
  Raster raster;
  raster.eta_bins = eta_bins;
  raster.detuning_bins = detuning_bins;
  raster.max_log_negativity.assign(eta_bins * detuning_bins, std::nullopt);
  raster.counts.assign(eta_bins * detuning_bins, 0);

  auto usable = [](const SweepRecord& r) {
    return r.stable() && r.entanglement && r.state->eta >= 0 && r.state->eta <= 1;
  };
  auto ratio = [](const SweepRecord& r) { return r.state->delta / r.params.mechanical_freq; };

  if (detuning_range) {
    raster.detuning_lo = detuning_range->first;
    raster.detuning_hi = detuning_range->second;
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const SweepRecord& r : records) {
      if (!usable(r)) continue;
      lo = std::min(lo, ratio(r));
      hi = std::max(hi, ratio(r));
    }
    if (!(lo <= hi)) {
      lo = 0;
      hi = 1;
    } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
      lo -= 0.5;
      hi += 0.5;
    }
    raster.detuning_lo = lo;
    raster.detuning_hi = hi;
  }

  auto bin = [](double v, double lo, double hi, std::size_t n) -> std::optional<std::size_t> {
    if (!(v >= lo && v <= hi)) return std::nullopt;
    const double f = (v - lo) / (hi - lo);
    return std::min(n - 1, static_cast<std::size_t>(f * static_cast<double>(n)));
  };

  for (const SweepRecord& r : records) {
    if (!usable(r)) continue;
    const auto i = bin(r.state->eta, raster.eta_lo, raster.eta_hi, eta_bins);
    const auto j = bin(ratio(r), raster.detuning_lo, raster.detuning_hi, detuning_bins);
    if (!i || !j) continue;
    auto& cell = raster.max_log_negativity[*i * detuning_bins + *j];
    const double en = r.entanglement->log_negativity;
    cell = cell ? std::max(*cell, en) : en;
    ++raster.counts[*i * detuning_bins + *j];
  }
  return raster;
}

void emit_raster(const Raster& raster, std::ostream& out) {
  out << "eta,delta_over_omega_m,max_log_negativity,count\n";
  for (std::size_t i = 0; i < raster.eta_bins; ++i) {
    for (std::size_t j = 0; j < raster.detuning_bins; ++j) {
      const auto& cell = raster.at(i, j);
      out << format_double(raster.eta_center(i)) << ',' << format_double(raster.detuning_center(j))
          << ',' << (cell ? format_double(*cell) : std::string{}) << ','
          << raster.counts[i * raster.detuning_bins + j] << '\n';
    }
  }
}

void emit_raster(const Raster& raster, const std::string& path) {
  write_to(path, [&](std::ostream& out) { emit_raster(raster, out); });
}

}  // namespace optomech
