#include "covpair/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "covpair/errors.hpp"

namespace covpair {

namespace {

using complexd = std::complex<double>;

// G7/K15 node-weight table.  Nodes are the positive Kronrod abscissae; the
// first four carry the embedded Gauss weights.
constexpr int kNumNodes = 8;
constexpr double kNode[kNumNodes] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
    0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
constexpr double kWg[kNumNodes] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
    0.0, 0.0, 0.0, 0.0};
constexpr double kWk[kNumNodes] = {
    0.209482141084728, 0.190350578064785, 0.140653259715525, 0.063092092629979,
    0.204432940075298, 0.169004726639267, 0.104790010322250, 0.022935322010529};

double norm_of(double v) { return std::abs(v); }
double norm_of(const complexd& v) { return std::abs(v); }

template <class T>
void check_finite(const T& v, double where) {
  if (!std::isfinite(norm_of(v))) {
    throw NonFiniteSample("integrand returned a non-finite value near t = " +
                          std::to_string(where));
  }
}

// One G7K15 application; returns the K15 value and a QUADPACK-style error
// estimate built from |K15-G7| damped by the integrand variation.
template <class T, class F>
void gk15(const F& f, double a, double b, T& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  T samples[15];
  double offsets[15];
  samples[0] = f(c);
  offsets[0] = c;
  int m = 1;
  for (int i = 1; i < kNumNodes; ++i) {
    const double dx = h * kNode[i];
    samples[m] = f(c - dx);
    offsets[m] = c - dx;
    ++m;
    samples[m] = f(c + dx);
    offsets[m] = c + dx;
    ++m;
  }
  for (int i = 0; i < 15; ++i) check_finite(samples[i], offsets[i]);

  T k = kWk[0] * samples[0];
  T g = kWg[0] * samples[0];
  double resabs = kWk[0] * norm_of(samples[0]);
  for (int i = 1; i < kNumNodes; ++i) {
    const T pair = samples[2 * i - 1] + samples[2 * i];
    k += kWk[i] * pair;
    if (kWg[i] != 0.0) g += kWg[i] * pair;
    resabs += kWk[i] * (norm_of(samples[2 * i - 1]) + norm_of(samples[2 * i]));
  }

  const T mean = k * 0.5;
  double resasc = kWk[0] * norm_of(samples[0] - mean);
  for (int i = 1; i < kNumNodes; ++i) {
    resasc += kWk[i] * (norm_of(samples[2 * i - 1] - mean) + norm_of(samples[2 * i] - mean));
  }
  resasc *= h;
  resabs *= h;

  value = k * h;
  err = norm_of((k - g) * h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  err = std::max(err, round_floor);
}

template <class T>
struct Interval {
  double a, b;
  T value;
  double err;
};

template <class T>
struct AdaptOutcome {
  T value{};
  double err = 0.0;
  long subdivisions = 0;
  bool converged = true;
};

template <class T, class F>
AdaptOutcome<T> adaptive_finite(const F& f, double a, double b, double abs_tol, double rel_tol,
                                long max_subdivisions, std::span<const double> breakpoints = {}) {
  AdaptOutcome<T> out;
  if (!(b > a)) return out;

  std::vector<double> edges;
  edges.push_back(a);
  for (double bp : breakpoints) {
    if (bp > a && bp < b) edges.push_back(bp);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Interval<T>> heap;
  auto cmp = [](const Interval<T>& l, const Interval<T>& r) { return l.err < r.err; };
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Interval<T> iv{edges[i], edges[i + 1], T{}, 0.0};
    gk15(f, iv.a, iv.b, iv.value, iv.err);
    total += iv.value;
    total_err += iv.err;
    heap.push_back(iv);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }

  long splits = 0;
  while (total_err > std::max(abs_tol, rel_tol * norm_of(total)) && splits < max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Interval<T> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval at rounding resolution
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), cmp);
      break;
    }
    Interval<T> left{worst.a, mid, T{}, 0.0};
    Interval<T> right{mid, worst.b, T{}, 0.0};
    gk15(f, left.a, left.b, left.value, left.err);
    gk15(f, right.a, right.b, right.value, right.err);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;

    if ((splits & 1023) == 0) {  // refresh running sums against drift
      total = T{};
      total_err = 0.0;
      for (const auto& iv : heap) {
        total += iv.value;
        total_err += iv.err;
      }
    }
  }

  out.value = total;
  out.err = total_err;
  out.subdivisions = splits;
  out.converged = total_err <= std::max(abs_tol, rel_tol * norm_of(total));
  return out;
}

// ---------------------------------------------------------------------------
// 2D panels

struct Panel {
  double x0, x1, y0, y1;
  double value;
  double err;
};

template <class F>
void gk2d(const F& f, Panel& p) {
  const double cx = 0.5 * (p.x0 + p.x1), hx = 0.5 * (p.x1 - p.x0);
  const double cy = 0.5 * (p.y0 + p.y1), hy = 0.5 * (p.y1 - p.y0);

  double xs[15], ys[15], wkx[15], wgx[15];
  xs[0] = cx;
  ys[0] = cy;
  wkx[0] = kWk[0];
  wgx[0] = kWg[0];
  int m = 1;
  for (int i = 1; i < kNumNodes; ++i) {
    xs[m] = cx - hx * kNode[i];
    ys[m] = cy - hy * kNode[i];
    wkx[m] = kWk[i];
    wgx[m] = kWg[i];
    ++m;
    xs[m] = cx + hx * kNode[i];
    ys[m] = cy + hy * kNode[i];
    wkx[m] = kWk[i];
    wgx[m] = kWg[i];
    ++m;
  }

  double kk = 0.0, gg = 0.0;
  for (int j = 0; j < 15; ++j) {
    double row_k = 0.0, row_g = 0.0;
    for (int i = 0; i < 15; ++i) {
      const double v = f(xs[i], ys[j]);
      if (!std::isfinite(v)) {
        throw NonFiniteSample("integrand returned a non-finite value at (" +
                              std::to_string(xs[i]) + ", " + std::to_string(ys[j]) + ")");
      }
      row_k += wkx[i] * v;
      if (wgx[i] != 0.0) row_g += wgx[i] * v;
    }
    kk += wkx[j] * row_k;
    if (wgx[j] != 0.0) gg += wgx[j] * row_g;
  }
  const double area = hx * hy;
  p.value = kk * area;
  p.err = std::abs(kk - gg) * area +
          50.0 * std::numeric_limits<double>::epsilon() * std::abs(kk) * area;
}

// integral over the part of the square |x-P| <= h (clipped to rect) around a
// declared singular point, in local polar coordinates.
double polar_cell(const std::function<double(double, double)>& f, Point2 p, double h,
                  const Rect& rect, double tol, long max_subdivisions) {
  constexpr double kPi = 3.14159265358979323846264338328;

  auto rmax_at = [&](double theta) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    double r = h / std::max(std::abs(ct), std::abs(st));
    if (ct > 0.0) r = std::min(r, (rect.x1 - p.x) / ct);
    if (ct < 0.0) r = std::min(r, (rect.x0 - p.x) / ct);
    if (st > 0.0) r = std::min(r, (rect.y1 - p.y) / st);
    if (st < 0.0) r = std::min(r, (rect.y0 - p.y) / st);
    return r;
  };

  auto wedge = [&](double theta) {
    const double rmax = rmax_at(theta);
    if (!(rmax > 0.0)) return 0.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    auto radial = [&](double r) { return f(p.x + r * ct, p.y + r * st) * r; };
    auto res = adaptive_finite<double>(radial, 0.0, rmax, tol * 0.02, 1e-10, max_subdivisions);
    return res.value;
  };

  std::vector<double> theta_breaks;
  for (int k = 1; k < 8; ++k) theta_breaks.push_back(k * kPi / 4.0);
  auto res =
      adaptive_finite<double>(wedge, 0.0, 2.0 * kPi, tol, 1e-10, max_subdivisions, theta_breaks);
  return res.value;
}

}  // namespace

IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            const QuadratureConfig& cfg, std::span<const double> breakpoints) {
  auto out = adaptive_finite<double>(f, a, b, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions,
                                     breakpoints);
  return {out.value, out.err, out.subdivisions, out.converged};
}

IntegralResult integrate_2d(const std::function<double(double, double)>& f, const Rect& region,
                            const QuadratureConfig& cfg, std::span<const Point2> singularities) {
  IntegralResult result;
  if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) return result;

  std::vector<Rect> rects{region};
  double polar_sum = 0.0;

  for (const Point2& p : singularities) {
    for (std::size_t i = 0; i < rects.size(); ++i) {
      const Rect r = rects[i];
      const bool inside =
          p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1;
      if (!inside) continue;
      double h = cfg.singularity_exclusion_radius;
      h = std::min(h, 0.25 * std::min(r.x1 - r.x0, r.y1 - r.y0));
      if (!(h > 0.0)) continue;

      polar_sum += polar_cell(f, p, h, r, cfg.abs_tol * 0.1, cfg.max_subdivisions);

      const double cx0 = std::max(r.x0, p.x - h), cx1 = std::min(r.x1, p.x + h);
      const double cy0 = std::max(r.y0, p.y - h), cy1 = std::min(r.y1, p.y + h);
      rects.erase(rects.begin() + static_cast<std::ptrdiff_t>(i));
      auto push_if = [&](Rect nr) {
        if (nr.x1 > nr.x0 && nr.y1 > nr.y0) rects.push_back(nr);
      };
      push_if({r.x0, cx0, r.y0, r.y1});
      push_if({cx1, r.x1, r.y0, r.y1});
      push_if({cx0, cx1, r.y0, cy0});
      push_if({cx0, cx1, cy1, r.y1});
      break;
    }
  }

  std::vector<Panel> heap;
  auto cmp = [](const Panel& l, const Panel& r) { return l.err < r.err; };
  double total = 0.0, total_err = 0.0;
  for (const Rect& r : rects) {
    Panel p{r.x0, r.x1, r.y0, r.y1, 0.0, 0.0};
    gk2d(f, p);
    total += p.value;
    total_err += p.err;
    heap.push_back(p);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }

  long splits = 0;
  while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total + polar_sum)) &&
         splits < cfg.max_subdivisions && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Panel worst = heap.back();
    heap.pop_back();

    Panel a = worst, b = worst;
    if (worst.x1 - worst.x0 >= worst.y1 - worst.y0) {
      const double mid = 0.5 * (worst.x0 + worst.x1);
      if (!(mid > worst.x0 && mid < worst.x1)) {
        heap.push_back(worst);
        std::push_heap(heap.begin(), heap.end(), cmp);
        break;
      }
      a.x1 = mid;
      b.x0 = mid;
    } else {
      const double mid = 0.5 * (worst.y0 + worst.y1);
      if (!(mid > worst.y0 && mid < worst.y1)) {
        heap.push_back(worst);
        std::push_heap(heap.begin(), heap.end(), cmp);
        break;
      }
      a.y1 = mid;
      b.y0 = mid;
    }
    gk2d(f, a);
    gk2d(f, b);
    total += a.value + b.value - worst.value;
    total_err += a.err + b.err - worst.err;
    heap.push_back(a);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(b);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;

    if ((splits & 1023) == 0) {
      total = 0.0;
      total_err = 0.0;
      for (const auto& p : heap) {
        total += p.value;
        total_err += p.err;
      }
    }
  }

  result.value = total + polar_sum;
  result.error_estimate = total_err;
  result.subdivisions = splits;
  result.converged =
      total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(result.value));
  return result;
}

// ---------------------------------------------------------------------------
// Semi-infinite integrals

namespace {

// Wynn epsilon table over complex partial sums.  Returns the top even-column
// extrapolation; err receives the distance to the previous order.
class WynnTable {
 public:
  void push(complexd s) {
    std::vector<complexd> next(cols_.size() + 1);
    next[0] = s;
    for (std::size_t k = 1; k < next.size(); ++k) {
      const complexd diff = next[k - 1] - cols_[k - 1];
      const complexd below = (k >= 2) ? cols_[k - 2] : complexd(0.0, 0.0);
      if (std::abs(diff) < 1e-300) {
        // equal neighbors: park a huge auxiliary value, the next even column
        // then collapses back to `below`
        next[k] = complexd(1e300, 0.0);
      } else {
        next[k] = below + 1.0 / diff;
      }
    }
    cols_ = std::move(next);
  }

  bool has_estimate() const { return cols_.size() >= 3; }

  complexd estimate() const {
    std::size_t k = cols_.size() - 1;
    if (k % 2 != 0) --k;  // even columns approximate the sum
    return cols_[k];
  }

 private:
  std::vector<complexd> cols_;  // current diagonal: cols_[k] = eps_k of newest entry
};

}  // namespace

ComplexIntegralResult integrate_oscillatory_semiaxis(
    const std::function<std::complex<double>(double)>& f, double omega, double head, double tol,
    int max_segments) {
  constexpr double kPi = 3.14159265358979323846264338328;
  ComplexIntegralResult out;
  if (!(omega > 0.0)) throw DomainError("oscillatory integral requires omega > 0");

  const double half = kPi / omega;
  const double t1 = half * std::max(1.0, std::ceil(std::max(head, half) / half));
  auto head_res = adaptive_finite<complexd>(f, 0.0, t1, tol * 0.25, 1e-12, 4000);
  double acc_err = head_res.err;

  WynnTable table;
  complexd partial(0.0, 0.0);
  complexd prev_est(0.0, 0.0);
  bool have_prev = false;
  int stable = 0;
  complexd best(0.0, 0.0);
  double best_err = std::numeric_limits<double>::infinity();
  bool converged = false;

  int tiny_segments = 0;
  for (int k = 0; k < max_segments; ++k) {
    const double a = t1 + k * half;
    const double b = a + half;
    auto seg = adaptive_finite<complexd>(f, a, b, tol * 0.01, 1e-12, 800);
    acc_err += seg.err;
    partial += seg.value;

    // tail already dead: no extrapolation needed
    if (std::abs(seg.value) < 0.05 * tol) {
      if (++tiny_segments >= 2) {
        best = partial;
        best_err = std::abs(seg.value);
        converged = true;
        break;
      }
    } else {
      tiny_segments = 0;
    }

    table.push(partial);
    if (!table.has_estimate()) continue;
    const complexd est = table.estimate();
    if (have_prev) {
      const double delta = std::abs(est - prev_est);
      if (delta < best_err) {
        best = est;
        best_err = delta;
      }
      stable = (delta < 0.5 * tol) ? stable + 1 : 0;
      if (stable >= 2) {
        converged = true;
        break;
      }
    }
    prev_est = est;
    have_prev = true;
  }

  out.value = head_res.value + (std::isfinite(best_err) ? best : partial);
  out.error_estimate = acc_err + (std::isfinite(best_err) ? best_err : std::abs(partial));
  out.converged = converged && head_res.converged;
  return out;
}

ComplexIntegralResult integrate_decaying_semiaxis(
    const std::function<std::complex<double>(double)>& f, double first_block, double tol,
    int max_blocks) {
  ComplexIntegralResult out;
  if (!(first_block > 0.0)) throw DomainError("decaying integral requires first_block > 0");

  complexd total(0.0, 0.0);
  double acc_err = 0.0;
  double a = 0.0;
  double width = first_block;
  double prev_mag = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int k = 0; k < max_blocks; ++k) {
    const double b = a + width;
    auto blk = adaptive_finite<complexd>(f, a, b, tol * 0.1, 1e-12, 4000);
    total += blk.value;
    acc_err += blk.err;
    const double mag = std::abs(blk.value);
    if (mag < 0.25 * tol && prev_mag < 0.25 * tol) {
      // tail dominated by a geometric-or-faster decaying block sequence
      acc_err += 2.0 * mag;
      converged = true;
      break;
    }
    prev_mag = mag;
    a = b;
    width *= 2.0;
  }

  out.value = total;
  out.error_estimate = acc_err;
  out.converged = converged;
  return out;
}

}  // namespace covpair
