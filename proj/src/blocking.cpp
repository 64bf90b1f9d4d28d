#include "pcminimax/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pcm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sinh(w) / w
cplx sinhc(cplx w) {
  if (std::abs(w) < 1e-3) {
    const cplx w2 = w * w;
    return 1.0 + w2 / 6.0 + w2 * w2 / 120.0;
  }
  return std::sinh(w) / w;
}

// Integral of exp(-z t) over [lo, hi); zero for an empty interval.
cplx exp_integral(double lo, double hi, cplx z) {
  if (!(hi > lo)) return 0.0;
  const double h = hi - lo;
  const double mid = 0.5 * (lo + hi);
  return std::exp(-z * mid) * h * sinhc(z * (0.5 * h));
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::sampled_grid: return "sampled-grid";
    case WeightKind::piecewise_constant: return "piecewise-constant";
    case WeightKind::exponential_decay: return "exponential-decay";
    case WeightKind::windowed_cosine: return "windowed-cosine";
    case WeightKind::indicator: return "indicator";
  }
  return "unknown";
}

WeightFunction WeightFunction::sampled_grid(std::vector<double> values, double step) {
  require(step > 0.0 && std::isfinite(step), "sampled-grid: step must be positive");
  require(values.size() >= 2, "sampled-grid: need at least two samples");
  for (double v : values) require(std::isfinite(v), "sampled-grid: non-finite sample");
  WeightFunction w;
  w.kind_ = WeightKind::sampled_grid;
  w.params_ = {step};
  w.support_end_ = step * static_cast<double>(values.size() - 1);
  w.xs_ = std::move(values);
  return w;
}

WeightFunction WeightFunction::piecewise_constant(std::vector<double> breakpoints, std::vector<double> values) {
  require(!values.empty() && breakpoints.size() == values.size() + 1,
          "piecewise-constant: need one more breakpoint than values");
  require(breakpoints.front() >= 0.0, "piecewise-constant: breakpoints must be >= 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(breakpoints[i] > breakpoints[i - 1] && std::isfinite(breakpoints[i]),
            "piecewise-constant: breakpoints must be strictly increasing and finite");
  for (double v : values) require(std::isfinite(v), "piecewise-constant: non-finite value");
  WeightFunction w;
  w.kind_ = WeightKind::piecewise_constant;
  w.support_end_ = breakpoints.back();
  w.xs_ = std::move(breakpoints);
  w.ys_ = std::move(values);
  return w;
}

WeightFunction WeightFunction::exponential_decay(double amplitude, double rate, double support_end) {
  require(std::isfinite(amplitude) && std::isfinite(rate), "exponential-decay: non-finite parameter");
  require(support_end > 0.0, "exponential-decay: support_end must be positive");
  require(rate > 0.0 || std::isfinite(support_end),
          "exponential-decay: rate must be positive for unbounded support");
  WeightFunction w;
  w.kind_ = WeightKind::exponential_decay;
  w.params_ = {amplitude, rate};
  w.support_end_ = support_end;
  return w;
}

WeightFunction WeightFunction::windowed_cosine(double amplitude, double frequency, double phase, double window_end) {
  require(std::isfinite(amplitude) && std::isfinite(frequency) && std::isfinite(phase),
          "windowed-cosine: non-finite parameter");
  require(window_end > 0.0 && std::isfinite(window_end), "windowed-cosine: window_end must be positive and finite");
  WeightFunction w;
  w.kind_ = WeightKind::windowed_cosine;
  w.params_ = {amplitude, frequency, phase};
  w.support_end_ = window_end;
  return w;
}

WeightFunction WeightFunction::indicator(double start, double end, double level) {
  require(start >= 0.0 && end >= start && std::isfinite(end), "indicator: need 0 <= start <= end < inf");
  require(std::isfinite(level), "indicator: non-finite level");
  WeightFunction w;
  w.kind_ = WeightKind::indicator;
  w.params_ = {start, end, level};
  w.support_end_ = end;
  return w;
}

WeightFunction WeightFunction::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open weight CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty weight CSV: " + path.string());
  line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return ch == ' ' || ch == '\r'; }), line.end());
  if (line != "t,value") throw InvalidArgument("weight CSV header must be \"t,value\": " + path.string());

  std::vector<double> ts;
  std::vector<double> vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string t_str;
    std::string v_str;
    if (!std::getline(row, t_str, ',') || !std::getline(row, v_str))
      throw InvalidArgument("malformed weight CSV row " + std::to_string(lineno));
    try {
      ts.push_back(std::stod(t_str));
      vs.push_back(std::stod(v_str));
    } catch (const std::exception&) {
      throw InvalidArgument("non-numeric weight CSV row " + std::to_string(lineno));
    }
  }
  if (ts.size() < 2) throw InvalidArgument("weight CSV needs at least two rows");
  if (std::abs(ts.front()) > 1e-12) throw InvalidArgument("weight CSV grid must start at t = 0");
  const double step = ts[1] - ts[0];
  if (!(step > 0.0)) throw InvalidArgument("weight CSV grid must be increasing");
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double expected = step * static_cast<double>(i);
    if (std::abs(ts[i] - expected) > 1e-6 * step)
      throw InvalidArgument("weight CSV grid is not uniform at row " + std::to_string(i + 2));
  }
  return sampled_grid(std::move(vs), step);
}

double WeightFunction::operator()(double t) const {
  if (t < 0.0 || t >= support_end_) return 0.0;
  switch (kind_) {
    case WeightKind::sampled_grid: {
      const double pos = t / params_[0];
      const auto i = static_cast<std::size_t>(pos);
      if (i + 1 >= xs_.size()) return xs_.back();
      const double frac = pos - static_cast<double>(i);
      return xs_[i] + frac * (xs_[i + 1] - xs_[i]);
    }
    case WeightKind::piecewise_constant: {
      if (t < xs_.front()) return 0.0;
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      return ys_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }
    case WeightKind::exponential_decay:
      return params_[0] * std::exp(-params_[1] * t);
    case WeightKind::windowed_cosine:
      return params_[0] * std::cos(kTwoPi * params_[1] * t + params_[2]);
    case WeightKind::indicator:
      return t >= params_[0] ? params_[2] : 0.0;
  }
  return 0.0;
}

std::optional<cplx> WeightFunction::exact_fourier_integral(double t0, double t1, double omega) const {
  const double lo_support = kind_ == WeightKind::indicator ? params_[0] : 0.0;
  const double lo = std::max(t0, lo_support);
  const double hi = std::min(t1, support_end_);
  const cplx iw{0.0, omega};
  switch (kind_) {
    case WeightKind::sampled_grid:
      return std::nullopt;
    case WeightKind::piecewise_constant: {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < ys_.size(); ++i) {
        const double a = std::max(t0, xs_[i]);
        const double b = std::min(t1, xs_[i + 1]);
        acc += ys_[i] * exp_integral(a, b, iw);
      }
      return acc;
    }
    case WeightKind::exponential_decay:
      return params_[0] * exp_integral(lo, hi, cplx{params_[1], omega});
    case WeightKind::windowed_cosine: {
      const double w0 = kTwoPi * params_[1];
      const cplx plus = std::polar(1.0, params_[2]) * exp_integral(lo, hi, cplx{0.0, omega - w0});
      const cplx minus = std::polar(1.0, -params_[2]) * exp_integral(lo, hi, cplx{0.0, omega + w0});
      return 0.5 * params_[0] * (plus + minus);
    }
    case WeightKind::indicator:
      return params_[2] * exp_integral(lo, hi, iw);
  }
  return std::nullopt;
}

double WeightFunction::l1_norm() const {
  switch (kind_) {
    case WeightKind::sampled_grid: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i) s += 0.5 * (std::abs(xs_[i]) + std::abs(xs_[i + 1]));
      return s * params_[0];
    }
    case WeightKind::piecewise_constant: {
      double s = 0.0;
      for (std::size_t i = 0; i < ys_.size(); ++i) s += std::abs(ys_[i]) * (xs_[i + 1] - xs_[i]);
      return s;
    }
    case WeightKind::exponential_decay: {
      const double amp = std::abs(params_[0]);
      const double rate = params_[1];
      if (rate == 0.0) return amp * support_end_;
      return amp * -std::expm1(-rate * support_end_) / rate;
    }
    case WeightKind::windowed_cosine: {
      constexpr int n = 1 << 16;
      const double h = support_end_ / n;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::abs((*this)((i + 0.5) * h));
      return s * h;
    }
    case WeightKind::indicator:
      return std::abs(params_[2]) * (params_[1] - params_[0]);
  }
  return 0.0;
}

BlockedFunction::BlockedFunction(WeightFunction a, double period, std::size_t blocks)
    : weight_(std::move(a)), period_(period), blocks_(blocks) {
  require(period > 0.0 && std::isfinite(period), "block_function: period must be positive");
  require(blocks >= 1, "block_function: need at least one block");
}

bool BlockedFunction::beyond_support(std::size_t j) const {
  return static_cast<double>(j) * period_ >= weight_.support_end();
}

double BlockedFunction::operator()(std::size_t j, double u) const {
  const double v = weight_(u + static_cast<double>(j) * period_);
  if (!std::isfinite(v)) throw NumericalError("weight function evaluation failed");
  return v;
}

BlockedFunction block_function(const WeightFunction& a, double period, std::size_t blocks) {
  return BlockedFunction(a, period, blocks);
}

long basis_frequency(std::size_t k) {
  const long half = static_cast<long>(k / 2);
  return (k % 2 == 0) ? half : -half;
}

FourierBlockCoefficients::FourierBlockCoefficients(double period, CMatrix coeffs)
    : period_(period), coeffs_(std::move(coeffs)) {
  require(period > 0.0, "FourierBlockCoefficients: period must be positive");
  require(coeffs_.rows() >= 1 && coeffs_.cols() >= 1, "FourierBlockCoefficients: empty coefficient matrix");
}

CVector FourierBlockCoefficients::block(std::size_t j) const {
  CVector out(K());
  for (std::size_t r = 0; r < K(); ++r) out[r] = coeffs_(r, j);
  return out;
}

double FourierBlockCoefficients::block_norm(std::size_t j) const {
  double s = 0.0;
  for (std::size_t r = 0; r < K(); ++r) s += std::norm(coeffs_(r, j));
  return std::sqrt(s);
}

bool FourierBlockCoefficients::is_real() const {
  return std::all_of(coeffs_.data().begin(), coeffs_.data().end(), [](cplx z) { return z.imag() == 0.0; });
}

std::optional<std::size_t> FourierBlockCoefficients::conjugate_partner(std::size_t k) const {
  const long m = basis_frequency(k);
  if (m == 0) return k;
  // m > 0 sits at k = 2m, -m at k = 2m + 1.
  const std::size_t partner = m > 0 ? k + 1 : k - 1;
  if (partner > K()) return std::nullopt;
  return partner;
}

FourierBlockCoefficients FourierBlockCoefficients::scaled(double factor) const {
  CMatrix m = coeffs_;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto& z : m.row(r)) z *= factor;
  return {period_, std::move(m)};
}

namespace {

void check_truncation(std::size_t K, std::size_t quad_nodes) {
  require(K >= 1, "fourier_coefficients: K must be >= 1");
  if (quad_nodes < 2 * K)
    throw InvalidArgument("fourier_coefficients: quad_nodes = " + std::to_string(quad_nodes) +
                          " is below the 2K = " + std::to_string(2 * K) + " safeguard");
}

CVector trapezoid_block(const BlockedFunction& bf, std::size_t j, std::size_t K, std::size_t n) {
  const double T = bf.period();
  const double h = T / static_cast<double>(n);
  std::vector<double> samples(n + 1);
  for (std::size_t i = 0; i < n; ++i) samples[i] = bf(j, static_cast<double>(i) * h);
  // left limit at u = T
  samples[n] = bf(j, std::nextafter(T, 0.0));

  const double scale = 1.0 / std::sqrt(T);
  CVector out(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const long m = basis_frequency(k);
    cplx acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      // reduce m*i modulo n so the phase argument stays small
      const long phase_index = static_cast<long>((m * static_cast<long>(i)) % static_cast<long>(n));
      const double arg = -kTwoPi * static_cast<double>(phase_index) / static_cast<double>(n);
      acc += w * samples[i] * std::polar(1.0, arg);
    }
    out[k - 1] = acc * h * scale;
  }
  return out;
}

}  // namespace

FourierBlockCoefficients trapezoid_fourier_coefficients(const BlockedFunction& bf, std::size_t K,
                                                        std::size_t quad_nodes) {
  check_truncation(K, quad_nodes);
  CMatrix m(K, bf.blocks());
  for (std::size_t j = 0; j < bf.blocks(); ++j) {
    if (bf.beyond_support(j)) continue;
    const CVector col = trapezoid_block(bf, j, K, quad_nodes);
    for (std::size_t r = 0; r < K; ++r) m(r, j) = col[r];
  }
  return {bf.period(), std::move(m)};
}

FourierBlockCoefficients fourier_coefficients(const BlockedFunction& bf, std::size_t K, std::size_t quad_nodes) {
  check_truncation(K, quad_nodes);
  const double T = bf.period();
  const double scale = 1.0 / std::sqrt(T);
  CMatrix m(K, bf.blocks());
  for (std::size_t j = 0; j < bf.blocks(); ++j) {
    if (bf.beyond_support(j)) continue;
    const double t0 = static_cast<double>(j) * T;
    if (bf.weight().kind() != WeightKind::sampled_grid) {
      for (std::size_t k = 1; k <= K; ++k) {
        const double omega = kTwoPi * static_cast<double>(basis_frequency(k)) / T;
        // exp(i omega j T) = 1 since omega T is a multiple of 2 pi
        const cplx v = *bf.weight().exact_fourier_integral(t0, t0 + T, omega);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw NumericalError("fourier_coefficients: non-finite closed form");
        m(k - 1, j) = v * scale;
      }
    } else {
      const CVector col = trapezoid_block(bf, j, K, quad_nodes);
      for (std::size_t r = 0; r < K; ++r) m(r, j) = col[r];
    }
  }
  return {T, std::move(m)};
}

AdmissibilityReport check_summability(const FourierBlockCoefficients& c, const TailModel& tail,
                                      const AdmissibilityBounds& bounds) {
  AdmissibilityReport rep;
  const std::size_t J = c.J();
  for (std::size_t j = 0; j < J; ++j) {
    const double n = c.block_norm(j);
    rep.partial_l1 += n;
    rep.partial_weighted += static_cast<double>(j + 1) * n * n;
  }
  for (std::size_t j = J >= 3 ? J - 3 : 0; j < J; ++j) rep.last_block_norms.push_back(c.block_norm(j));

  const double last = c.block_norm(J - 1);
  const double Jd = static_cast<double>(J);
  std::ostringstream diag;
  switch (tail.kind) {
    case TailKind::finite:
      if (last > 0.0) diag << "finite tail assumed but last retained block has norm " << last << "; ";
      break;
    case TailKind::geometric: {
      const double r = tail.rate;
      if (!(r >= 0.0 && r < 1.0)) {
        rep.tail_l1 = rep.tail_weighted = std::numeric_limits<double>::infinity();
        diag << "geometric tail ratio " << r << " >= 1: both sums diverge; ";
        break;
      }
      const double rho = r * r;
      rep.tail_l1 = last * r / (1.0 - r);
      rep.tail_weighted = last * last * (Jd * rho / (1.0 - rho) + rho / ((1.0 - rho) * (1.0 - rho)));
      break;
    }
    case TailKind::power: {
      const double alpha = tail.rate;
      if (last == 0.0) break;
      if (!(alpha > 1.0)) {
        rep.tail_l1 = rep.tail_weighted = std::numeric_limits<double>::infinity();
        diag << "power-law tail with exponent " << alpha
             << " <= 1: sum ||a_j|| and sum (j+1)||a_j||^2 diverge (harmonic or slower decay); ";
        break;
      }
      // ||a_j|| = last * (J / (j+1))^alpha for j >= J, sums by the midpoint integral rule
      const double x0 = Jd + 0.5;
      rep.tail_l1 = last * std::pow(Jd, alpha) * std::pow(x0, 1.0 - alpha) / (alpha - 1.0);
      rep.tail_weighted =
          last * last * std::pow(Jd, 2.0 * alpha) * std::pow(x0, 2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0);
      break;
    }
  }
  rep.total_l1 = rep.partial_l1 + rep.tail_l1;
  rep.total_weighted = rep.partial_weighted + rep.tail_weighted;
  if (!std::isfinite(rep.total_l1) || !std::isfinite(rep.total_weighted)) {
    rep.pass = false;
  }
  if (rep.total_l1 > bounds.max_l1) {
    rep.pass = false;
    diag << "sum ||a_j|| = " << rep.total_l1 << " exceeds bound " << bounds.max_l1 << "; ";
  }
  if (rep.total_weighted > bounds.max_weighted) {
    rep.pass = false;
    diag << "sum (j+1)||a_j||^2 = " << rep.total_weighted << " exceeds bound " << bounds.max_weighted << "; ";
  }
  rep.diagnosis = diag.str();
  if (rep.diagnosis.size() >= 2) rep.diagnosis.resize(rep.diagnosis.size() - 2);
  return rep;
}

}  // namespace pcm
