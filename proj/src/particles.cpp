#include "robinfluct/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "robinfluct/parallel.hpp"
#include "robinfluct/quadrature.hpp"
#include "robinfluct/rng.hpp"

namespace robinfluct {

InitialDensity InitialDensity::uniform(const BoxDomain& dom, double value) {
  if (!(value > 0.0)) throw std::invalid_argument("u0: uniform value must be positive");
  InitialDensity u;
  u.density = [value](const Point&) { return value; };
  u.sup = value;
  u.mass = value * dom.volume();
  std::ostringstream os;
  os << "uniform(" << value << ")";
  u.description = os.str();
  return u;
}

InitialDensity InitialDensity::box_indicator(const BoxDomain& dom, std::span<const double> lo,
                                             std::span<const double> hi, double value) {
  const int d = dom.dim();
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
    throw std::invalid_argument("u0: box bounds must match the domain dimension");
  if (!(value > 0.0)) throw std::invalid_argument("u0: box value must be positive");
  Point a{}, b{};
  double vol = 1.0;
  for (int i = 0; i < d; ++i) {
    a[i] = std::max(lo[i], dom.lo(i));
    b[i] = std::min(hi[i], dom.hi(i));
    if (!(b[i] > a[i])) throw std::invalid_argument("u0: box does not meet the domain");
    vol *= b[i] - a[i];
  }
  InitialDensity u;
  u.density = [a, b, d, value](const Point& x) {
    for (int i = 0; i < d; ++i)
      if (x[i] < a[i] || x[i] > b[i]) return 0.0;
    return value;
  };
  u.sup = value;
  u.mass = value * vol;
  u.description = "box";
  return u;
}

InitialDensity InitialDensity::cosine(const BoxDomain& dom, double base, double amplitude,
                                      std::span<const int> multi_index) {
  const int d = dom.dim();
  if (static_cast<int>(multi_index.size()) != d)
    throw std::invalid_argument("u0: cosine multi-index must match the domain dimension");
  if (!(base >= std::abs(amplitude)) || !(base > 0.0))
    throw std::invalid_argument("u0: cosine density requires base >= |amplitude| and base > 0");
  bool constant = true;
  std::array<double, kMaxDim> k{};
  for (int i = 0; i < d; ++i) {
    if (multi_index[i] < 0) throw std::invalid_argument("u0: negative multi-index");
    if (multi_index[i] > 0) constant = false;
    k[i] = multi_index[i] * std::numbers::pi / dom.side(i);
  }
  Point lo{};
  for (int i = 0; i < d; ++i) lo[i] = dom.lo(i);
  InitialDensity u;
  u.density = [=](const Point& x) {
    double p = 1.0;
    for (int i = 0; i < d; ++i) p *= std::cos(k[i] * (x[i] - lo[i]));
    return base + amplitude * p;
  };
  u.sup = base + std::abs(amplitude);
  u.mass = (constant ? base + amplitude : base) * dom.volume();
  u.description = "cosine";
  return u;
}

Observable eigen_observable(const BoxDomain& dom, const EigenMode& mode, std::string id) {
  Observable o;
  o.id = id.empty() ? "phi[" + mode.label(dom.dim()) + "]" : std::move(id);
  o.value = [dom, mode](const Point& x) { return eval_eigenfunction_unchecked(dom, mode, x); };
  o.gradient = [dom, mode](const Point& x) { return eigenfunction_gradient(dom, mode, x); };
  const double lambda = mode.eigenvalue;
  o.generator = [dom, mode, lambda](const Point& x) {
    return -lambda * eval_eigenfunction_unchecked(dom, mode, x);
  };
  o.mode = mode;
  return o;
}

Observable constant_observable(const BoxDomain&, double value, std::string id) {
  Observable o;
  o.id = std::move(id);
  o.value = [value](const Point&) { return value; };
  o.gradient = [](const Point&) { return Point{}; };
  o.generator = [](const Point&) { return 0.0; };
  return o;
}

Point ParticleEnsemble::position(std::size_t i) const {
  Point x{};
  for (int a = 0; a < dim; ++a) x[a] = positions[i * dim + a];
  return x;
}

std::size_t ParticleEnsemble::alive_count() const {
  return static_cast<std::size_t>(
      std::count_if(hazards.begin(), hazards.end(), [](const HazardState& h) { return h.alive; }));
}

namespace {

struct Birth {
  Point x{};
  HazardState hazard;
};

void check_density(const InitialDensity& u0) {
  if (!u0.density) throw std::invalid_argument("u0: density is not set");
  if (!(u0.mass > 0.0) || u0.mass > 1.0 + 1e-12)
    throw std::invalid_argument("u0: total mass must lie in (0, 1]");
  if (!(u0.sup > 0.0)) throw std::invalid_argument("u0: sup must be positive");
}

// Initial state of particle i: alive with probability mass, position by
// rejection against sup u0, threshold Exp(1).
Birth sample_birth(const BoxDomain& dom, const InitialDensity& u0, std::uint64_t seed,
                   std::uint32_t replica, std::uint32_t particle) {
  Birth b;
  UniformStream init({seed, replica, particle, Purpose::kInitial});
  b.hazard.threshold = -std::log(uniform_at({seed, replica, particle, Purpose::kThreshold}, 0));
  if (u0.mass < 1.0 && init.next() >= u0.mass) {
    b.hazard.alive = false;
    b.hazard.kill_time = 0.0;
    b.x = dom.center();
    return b;
  }
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    for (int a = 0; a < dom.dim(); ++a) b.x[a] = dom.lo(a) + dom.side(a) * init.next();
    if (init.next() * u0.sup <= u0.density(b.x)) return b;
  }
  throw std::runtime_error("u0: rejection sampling did not terminate");
}

}  // namespace

ParticleEnsemble init_ensemble(const BoxDomain& dom, std::size_t n, const InitialDensity& u0,
                               std::uint64_t seed, std::uint32_t replica) {
  check_density(u0);
  ParticleEnsemble e;
  e.dim = dom.dim();
  e.seed = seed;
  e.replica = replica;
  e.positions.resize(n * e.dim);
  e.hazards.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Birth b = sample_birth(dom, u0, seed, replica, static_cast<std::uint32_t>(i));
    for (int a = 0; a < e.dim; ++a) e.positions[i * e.dim + a] = b.x[a];
    e.hazards[i] = b.hazard;
  }
  return e;
}

ParticleEnsemble step_ensemble(ParticleEnsemble e, const BoxDomain& dom, double dt,
                               const KillingRate& q, const PathConfig& cfg) {
  if (dt < 0.0) throw std::invalid_argument("step_ensemble: dt must be nonnegative");
  if (dt == 0.0) return e;
  const int d = e.dim;
  const double t_next = e.t + dt;
  const double scale = std::sqrt(cfg.c * dt);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e.hazards[i].alive) continue;
    const StreamId id{e.seed, e.replica, static_cast<std::uint32_t>(i), Purpose::kMotion};
    Point x = e.position(i);
    for (int a = 0; a < d; ++a)
      x[a] = dom.fold_axis(x[a] + scale * normal_at(id, e.step * d + a), a);
    for (int a = 0; a < d; ++a) e.positions[i * d + a] = x[a];
    e.hazards[i] = hazard_step(e.hazards[i], dom, x, t_next, dt, q, cfg);
  }
  e.step += 1;
  e.t = t_next;
  return e;
}

double empirical_pairing(const ParticleEnsemble& e,
                         const std::function<double(const Point&)>& phi) {
  if (e.size() == 0) return 0.0;
  std::vector<double> v(e.size(), 0.0);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e.hazards[i].alive) v[i] = phi(e.position(i));
  return pairwise_sum(v.data(), v.size()) / static_cast<double>(e.size());
}

MartingaleIncrement martingale_increment(const Observable& phi, const Point& before,
                                         const Point& after, double hazard, bool killed,
                                         double dt, double c) {
  const double f0 = phi.value(before);
  const double f1 = phi.value(after);
  const double p_kill = -std::expm1(-hazard);
  const Point g = phi.gradient(before);
  double grad2 = 0.0;
  for (double gi : g) grad2 += gi * gi;
  MartingaleIncrement m;
  m.increment = f1 - f0 - phi.generator(before) * dt - (killed ? f1 : 0.0) + f1 * p_kill;
  m.predictable = c * grad2 * dt + f1 * f1 * p_kill;
  return m;
}

MartingalePath martingale_track(const std::vector<ParticleEnsemble>& trajectory,
                                const Observable& phi, const PathConfig& cfg) {
  if (!phi.has_derivatives())
    throw std::invalid_argument("martingale_track: observable lacks gradient/generator data");
  MartingalePath out;
  if (trajectory.empty()) return out;
  const std::size_t n = trajectory.front().size();
  for (const auto& e : trajectory)
    if (e.size() != n) throw std::invalid_argument("martingale_track: ensemble size changed");
  const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;
  out.times.push_back(trajectory.front().t);
  out.martingale.push_back(0.0);
  out.predictable_qv.push_back(0.0);
  out.realized_qv.push_back(0.0);
  std::vector<double> inc(n), pred(n);
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const ParticleEnsemble& a = trajectory[k - 1];
    const ParticleEnsemble& b = trajectory[k];
    const double dt = b.t - a.t;
    for (std::size_t i = 0; i < n; ++i) {
      inc[i] = pred[i] = 0.0;
      if (!a.hazards[i].alive) continue;
      const auto m = martingale_increment(phi, a.position(i), b.position(i),
                                          b.hazards[i].accum - a.hazards[i].accum,
                                          !b.hazards[i].alive, dt, cfg.c);
      inc[i] = m.increment;
      pred[i] = m.predictable;
    }
    const double dm = pairwise_sum(inc.data(), n) * inv_n;
    out.times.push_back(b.t);
    out.martingale.push_back(out.martingale.back() + dm);
    out.predictable_qv.push_back(out.predictable_qv.back() +
                                 pairwise_sum(pred.data(), n) * inv_n * inv_n);
    out.realized_qv.push_back(out.realized_qv.back() + dm * dm);
  }
  return out;
}

namespace {

// Per-chunk partial sums; each chunk walks its particles in index order.
struct ChunkSums {
  std::vector<double> records;  // record x (observables + alive)
  std::vector<double> dm;       // per step
  std::vector<double> pred;     // per step
};

void run_chunk(const ReplicaSpec& spec, std::size_t first, std::size_t last,
               std::size_t steps, ChunkSums& sums) {
  const BoxDomain& dom = spec.domain;
  const PathConfig& cfg = spec.cfg;
  const int d = dom.dim();
  const std::size_t n_obs = spec.observables.size();
  const std::size_t width = n_obs + 1;
  const double dt = cfg.dt;
  const double scale = std::sqrt(cfg.c * dt);
  const double strip = cfg.mode == KillingMode::kLocalTime ? cfg.strip_eps : cfg.delta;
  const double rate = dt / strip;  // hazard per unit q inside the strip
  const bool q_const = spec.q.is_constant();
  const double hazard_const = spec.q.constant_value() * rate;
  const bool track = spec.martingale_observable.has_value();
  const Observable* mobs = track ? &*spec.martingale_observable : nullptr;
  const auto& rec = spec.record_steps;

  for (std::size_t i = first; i < last; ++i) {
    const auto pid = static_cast<std::uint32_t>(i);
    Birth b = sample_birth(dom, spec.u0, spec.seed, spec.replica, pid);
    if (!b.hazard.alive) continue;
    Point x = b.x;
    double accum = 0.0;
    const double threshold = b.hazard.threshold;
    std::size_t r = 0;
    if (r < rec.size() && rec[r] == 0) {
      double* row = &sums.records[r * width];
      for (std::size_t k = 0; k < n_obs; ++k) row[k] += spec.observables[k].value(x);
      row[n_obs] += 1.0;
      ++r;
    }
    NormalStream normals({spec.seed, spec.replica, pid, Purpose::kMotion});
    for (std::size_t step = 1; step <= steps; ++step) {
      const Point before = x;
      for (int a = 0; a < d; ++a) x[a] = dom.fold_axis(x[a] + scale * normals.next(), a);
      double dist = x[0] - dom.lo(0);
      for (int a = 0; a < d; ++a)
        dist = std::min(dist, std::min(x[a] - dom.lo(a), dom.hi(a) - x[a]));
      double hazard = 0.0;
      if (dist < strip)
        hazard = q_const ? hazard_const : spec.q(static_cast<double>(step) * dt, x) * rate;
      accum += hazard;
      const bool killed = accum >= threshold;
      if (track) {
        const auto m = martingale_increment(*mobs, before, x, hazard, killed, dt, cfg.c);
        sums.dm[step - 1] += m.increment;
        sums.pred[step - 1] += m.predictable;
      }
      if (killed) break;
      while (r < rec.size() && rec[r] == step) {
        double* row = &sums.records[r * width];
        for (std::size_t k = 0; k < n_obs; ++k) row[k] += spec.observables[k].value(x);
        row[n_obs] += 1.0;
        ++r;
      }
      if (r >= rec.size() && !track) break;
    }
  }
}

}  // namespace

ReplicaResult simulate_replica(const ReplicaSpec& spec, unsigned workers) {
  spec.cfg.validate();
  check_density(spec.u0);
  if (spec.chunk_size == 0) throw std::invalid_argument("simulate_replica: chunk_size must be positive");
  if (!std::is_sorted(spec.record_steps.begin(), spec.record_steps.end()))
    throw std::invalid_argument("simulate_replica: record steps must be sorted");
  if (spec.martingale_observable && !spec.martingale_observable->has_derivatives())
    throw std::invalid_argument("simulate_replica: martingale observable lacks derivative data");
  if (spec.particles > 0xFFFFFFFFull)
    throw std::invalid_argument("simulate_replica: too many particles for the RNG counter");
  const std::size_t max_rec = spec.record_steps.empty() ? 0 : spec.record_steps.back();
  const std::size_t steps =
      spec.martingale_observable ? std::max(max_rec, spec.cfg.steps()) : max_rec;
  const std::size_t n_obs = spec.observables.size();
  const std::size_t width = n_obs + 1;
  const std::size_t n_rec = spec.record_steps.size();
  const bool track = spec.martingale_observable.has_value();

  const std::size_t n_chunks = (spec.particles + spec.chunk_size - 1) / spec.chunk_size;
  std::vector<ChunkSums> chunks(n_chunks);
  parallel_for(n_chunks, workers, [&](std::size_t c) {
    ChunkSums& s = chunks[c];
    s.records.assign(n_rec * width, 0.0);
    if (track) {
      s.dm.assign(steps, 0.0);
      s.pred.assign(steps, 0.0);
    }
    const std::size_t first = c * spec.chunk_size;
    run_chunk(spec, first, std::min(spec.particles, first + spec.chunk_size), steps, s);
  });

  const double inv_n = spec.particles ? 1.0 / static_cast<double>(spec.particles) : 0.0;
  std::vector<double> column(n_chunks);
  auto reduce = [&](auto get) {
    for (std::size_t c = 0; c < n_chunks; ++c) column[c] = get(chunks[c]);
    return pairwise_sum(column.data(), n_chunks);
  };

  ReplicaResult out;
  out.times.reserve(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    out.times.push_back(static_cast<double>(spec.record_steps[r]) * spec.cfg.dt);
    std::vector<double> row(n_obs);
    for (std::size_t k = 0; k < n_obs; ++k)
      row[k] = reduce([&](const ChunkSums& s) { return s.records[r * width + k]; }) * inv_n;
    out.pairings.push_back(std::move(row));
    out.alive_fraction.push_back(
        reduce([&](const ChunkSums& s) { return s.records[r * width + n_obs]; }) * inv_n);
  }
  if (track) {
    MartingalePath m;
    m.times.push_back(0.0);
    m.martingale.push_back(0.0);
    m.predictable_qv.push_back(0.0);
    m.realized_qv.push_back(0.0);
    for (std::size_t k = 0; k < steps; ++k) {
      const double dm = reduce([&](const ChunkSums& s) { return s.dm[k]; }) * inv_n;
      const double pred = reduce([&](const ChunkSums& s) { return s.pred[k]; }) * inv_n * inv_n;
      m.times.push_back(static_cast<double>(k + 1) * spec.cfg.dt);
      m.martingale.push_back(m.martingale.back() + dm);
      m.predictable_qv.push_back(m.predictable_qv.back() + pred);
      m.realized_qv.push_back(m.realized_qv.back() + dm * dm);
    }
    out.martingale = std::move(m);
  }
  return out;
}

}  // namespace robinfluct
