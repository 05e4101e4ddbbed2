#include "theta_forge/discovery.hpp"

#include <algorithm>
#include <cstdlib>
#include <tuple>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

using Matrix = std::vector<std::vector<BigReal>>;

int sign_of(const ZSqrt2& z) {
  if (z.is_zero()) return 0;
  if (z.a >= 0 && z.b >= 0) return 1;
  if (z.a <= 0 && z.b <= 0) return -1;
  // Mixed signs: a + b sqrt2 has the sign of a exactly when a^2 > 2b^2.
  const int norm_sign = z.norm() > 0 ? 1 : -1;
  return z.a > 0 ? norm_sign : -norm_sign;
}

BigReal monomial_value(const std::vector<BigReal>& values, const std::vector<int>& exps, mpfr_prec_t bits) {
  BigReal out(1, bits);
  for (size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] != 0) out *= pow(values[i], static_cast<long>(exps[i]));
  }
  return out;
}

std::optional<ZSqrt2> round_to_lattice(const BigReal& x, int bound, const BigReal& tol, const BigReal& root2) {
  std::optional<ZSqrt2> best;
  BigReal best_err;
  for (int b = -bound; b <= bound; ++b) {
    const BigReal rest = x - root2 * static_cast<long>(b);
    BigReal rounded(rest);
    mpfr_rint(rounded.get(), rest.get(), MPFR_RNDN);
    const double a = rounded.to_double();
    if (std::abs(a) > bound) continue;
    const BigReal err = abs(rest - rounded);
    if (err < tol && (!best || err < best_err)) {
      best = ZSqrt2{static_cast<std::int64_t>(a), b};
      best_err = err;
    }
  }
  return best;
}

struct QrNull {
  enum class Kind { none, single, ambiguous } kind = Kind::none;
  std::vector<BigReal> vector;  // in the column order given to the solver
  std::string detail;
};

// Householder QR with column pivoting; reads the null direction off the last pivot.
QrNull null_vector(Matrix a, const BigReal& tiny, const BigReal& gap, mpfr_prec_t bits) {
  const size_t m = a.size();
  const size_t n = a.front().size();
  std::vector<size_t> perm(n);
  for (size_t j = 0; j < n; ++j) perm[j] = j;

  std::vector<BigReal> diag;
  for (size_t k = 0; k < n; ++k) {
    size_t best = k;
    BigReal best_norm(0, bits);
    for (size_t j = k; j < n; ++j) {
      BigReal s(0, bits);
      for (size_t i = k; i < m; ++i) s += a[i][j] * a[i][j];
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      for (size_t i = 0; i < m; ++i) std::swap(a[i][k], a[i][best]);
      std::swap(perm[k], perm[best]);
    }
    const BigReal norm = sqrt(best_norm);
    if (norm.is_zero()) {
      diag.push_back(BigReal(0, bits));
      continue;
    }
    const BigReal alpha = a[k][k].sign() > 0 ? -norm : norm;
    std::vector<BigReal> v(m - k, BigReal(0, bits));
    for (size_t i = k; i < m; ++i) v[i - k] = a[i][k];
    v[0] -= alpha;
    BigReal vv(0, bits);
    for (const auto& x : v) vv += x * x;
    if (!vv.is_zero()) {
      for (size_t j = k; j < n; ++j) {
        BigReal dot(0, bits);
        for (size_t i = k; i < m; ++i) dot += v[i - k] * a[i][j];
        const BigReal factor = 2 * dot / vv;
        for (size_t i = k; i < m; ++i) a[i][j] -= factor * v[i - k];
      }
    }
    diag.push_back(abs(a[k][k]));
  }

  const BigReal scale = diag.front();
  QrNull out;
  if (scale.is_zero()) {
    out.kind = QrNull::Kind::ambiguous;
    out.detail = "sample matrix is zero";
    return out;
  }
  size_t tiny_count = 0;
  for (const auto& d : diag) {
    if (d < tiny * scale) ++tiny_count;
  }
  if (tiny_count > 1) {
    out.kind = QrNull::Kind::ambiguous;
    out.detail = "sample matrix has " + std::to_string(tiny_count) + " negligible pivots";
    return out;
  }
  if (tiny_count == 0) {
    out.kind = diag.back() < gap * scale ? QrNull::Kind::ambiguous : QrNull::Kind::none;
    out.detail = "smallest pivot ratio " + format_residual(diag.back() / scale);
    return out;
  }
  if (!(diag.back() < tiny * scale) || (n >= 2 && diag[n - 2] < gap * scale)) {
    out.kind = QrNull::Kind::ambiguous;
    out.detail = "pivot gap too small to separate the null direction";
    return out;
  }

  // Back-substitute R11 y = -r12 with the last column as the free one.
  const size_t r = n - 1;
  std::vector<BigReal> y(r, BigReal(0, bits));
  for (size_t ii = r; ii-- > 0;) {
    BigReal s = -a[ii][r];
    for (size_t j = ii + 1; j < r; ++j) s -= a[ii][j] * y[j];
    y[ii] = s / a[ii][ii];
  }
  out.kind = QrNull::Kind::single;
  out.vector.assign(n, BigReal(0, bits));
  for (size_t j = 0; j < r; ++j) out.vector[perm[j]] = y[j];
  out.vector[perm[r]] = BigReal(1, bits);
  out.detail = "pivot ratio " + format_residual(diag.back() / scale);
  return out;
}

enum class AttemptStatus { found, none, retry, ambiguous };

struct Attempt {
  AttemptStatus status = AttemptStatus::none;
  std::vector<ZSqrt2> coeffs;
  BigReal held_out_residual;
  std::string note;
};

Relation relation_from(const MonomialBasis& basis, const std::vector<ZSqrt2>& coeffs) {
  Relation rel;
  rel.id = "discovered";
  rel.variables = basis.variables;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    if (!coeffs[j].is_zero()) rel.terms.push_back({basis.monomials[j], coeffs[j]});
  }
  rel.citation = "numeric discovery";
  rel.cls = RelationClass::identity;
  return rel;
}

Attempt attempt(const MonomialBasis& basis, const std::vector<BigReal>& samples, const Precision& prec,
                int coeff_bound) {
  const mpfr_prec_t bits = prec.bits();
  const size_t rows = samples.size();
  const size_t cols = basis.monomials.size();
  const size_t fit_rows = rows - kHeldOutSamples;

  Relation carrier;
  carrier.id = "basis";
  carrier.variables = basis.variables;

  Matrix values(rows);
  std::vector<std::string> errors(rows);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(rows); ++i) {
    try {
      const auto vars = evaluate_variables(carrier, samples[static_cast<size_t>(i)], prec);
      auto& row = values[static_cast<size_t>(i)];
      row.reserve(cols);
      for (const auto& mono : basis.monomials) row.push_back(monomial_value(vars, mono, bits));
    } catch (const std::exception& err) {
      errors[static_cast<size_t>(i)] = err.what();
    }
  }
  for (size_t i = 0; i < rows; ++i) {
    if (!errors[i].empty()) throw DomainError("sample q=" + samples[i].to_decimal(6) + ": " + errors[i]);
  }

  const BigReal tol = ten_to_minus(prec.digits / 2, bits);
  const BigReal gap = ten_to_minus(prec.digits / 4, bits);

  std::vector<BigReal> scale(cols, BigReal(0, bits));
  for (size_t j = 0; j < cols; ++j) {
    for (size_t i = 0; i < fit_rows; ++i) {
      if (abs(values[i][j]) > scale[j]) scale[j] = abs(values[i][j]);
    }
    if (scale[j].is_zero()) throw DomainError("monomial column " + std::to_string(j) + " vanishes on the samples");
    if (values[0][j].sign() < 0) scale[j] = -scale[j];
  }

  // Constant monomials are interchangeable; only the first joins the solve.
  std::vector<size_t> active;
  bool have_constant = false;
  for (size_t j = 0; j < cols; ++j) {
    bool constant = true;
    for (size_t i = 1; i < rows && constant; ++i) {
      constant = abs(values[i][j] - values[0][j]) < tol * abs(scale[j]);
    }
    if (constant && have_constant) continue;
    have_constant = have_constant || constant;
    active.push_back(j);
  }
  Attempt out;
  if (active.size() < 2) {
    out.note = "fewer than two independent monomials";
    return out;
  }

  Matrix fit(fit_rows, std::vector<BigReal>(active.size(), BigReal(0, bits)));
  for (size_t i = 0; i < fit_rows; ++i) {
    for (size_t jj = 0; jj < active.size(); ++jj) fit[i][jj] = values[i][active[jj]] / scale[active[jj]];
  }
  const QrNull nv = null_vector(std::move(fit), tol, gap, bits);
  if (nv.kind == QrNull::Kind::none) {
    out.note = "no dependency; " + nv.detail;
    return out;
  }
  if (nv.kind == QrNull::Kind::ambiguous) {
    out.status = AttemptStatus::ambiguous;
    out.note = nv.detail;
    return out;
  }

  std::vector<BigReal> real(cols, BigReal(0, bits));
  size_t pivot = active[0];
  for (size_t jj = 0; jj < active.size(); ++jj) {
    real[active[jj]] = nv.vector[jj] / scale[active[jj]];
    if (abs(real[active[jj]]) > abs(real[pivot])) pivot = active[jj];
  }
  const BigReal pivot_value = real[pivot];
  for (size_t j = 0; j < cols; ++j) real[j] = real[j] / pivot_value;

  const BigReal root2 = sqrt(BigReal(2, bits));
  std::optional<std::vector<ZSqrt2>> lattice;
  for (int h = 1; h <= coeff_bound && !lattice; ++h) {
    for (int a0 = -h; a0 <= h && !lattice; ++a0) {
      for (int b0 = -h; b0 <= h && !lattice; ++b0) {
        if (std::max(std::abs(a0), std::abs(b0)) != h) continue;
        const ZSqrt2 mu{a0, b0};
        if (sign_of(mu) <= 0) continue;
        const BigReal mu_val = mu.to_big(bits);
        std::vector<ZSqrt2> coeffs(cols);
        bool ok = true;
        for (size_t j = 0; j < cols && ok; ++j) {
          if (real[j].is_zero()) continue;
          const auto z = round_to_lattice(mu_val * real[j], coeff_bound, tol, root2);
          if (!z) {
            ok = false;
          } else {
            coeffs[j] = *z;
          }
        }
        if (ok) lattice = std::move(coeffs);
      }
    }
  }
  if (!lattice) {
    out.status = AttemptStatus::retry;
    out.note = "null vector does not round to Z[sqrt2] within the coefficient bound";
    return out;
  }

  out.coeffs = normalize_coefficients(*lattice);
  const Relation rel = relation_from(basis, out.coeffs);
  BigReal held(0, bits);
  BigReal fitted(0, bits);
  for (size_t i = 0; i < rows; ++i) {
    const auto vars = evaluate_variables(carrier, samples[i], prec);
    const BigReal r = residual_from_values(rel, vars, bits);
    BigReal& slot = i < fit_rows ? fitted : held;
    if (r > slot) slot = r;
  }
  out.held_out_residual = held;
  const BigReal accept = ten_to_minus(prec.digits - 15, bits);
  if (!(held < accept) || !(fitted < accept)) {
    out.status = AttemptStatus::retry;
    out.note = "candidate fails on held-out nomes, residual " + format_residual(held);
    return out;
  }
  out.status = AttemptStatus::found;
  out.note = "held-out residual " + format_residual(held) + " on " + std::to_string(kHeldOutSamples) +
             " nomes; " + nv.detail;
  return out;
}

}  // namespace

MonomialBasis MonomialBasis::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("variables") || !j.contains("monomials")) {
    throw UsageError("basis must be an object with \"variables\" and \"monomials\"");
  }
  MonomialBasis basis;
  std::string line = "basis |";
  for (const auto& v : j.at("variables")) {
    if (!v.is_string()) throw UsageError("basis variables must be strings name=recipe@power");
    line += " " + v.get<std::string>();
  }
  line += " | ";
  // Borrow the relation parser for the bindings with a placeholder term list.
  std::string zeros;
  for (size_t i = 0; i < j.at("variables").size(); ++i) zeros += i ? ",0" : "0";
  std::string ones;
  for (size_t i = 0; i < j.at("variables").size(); ++i) ones += i ? ",0" : "1";
  line += zeros + ":(1,0) " + ones + ":(1,0) | - | identity";
  basis.variables = parse_relation(line).variables;
  for (const auto& m : j.at("monomials")) {
    if (!m.is_array()) throw UsageError("each monomial must be an array of exponents");
    std::vector<int> exps;
    for (const auto& e : m) {
      if (!e.is_number_integer()) throw UsageError("monomial exponents must be integers");
      exps.push_back(e.get<int>());
    }
    basis.monomials.push_back(std::move(exps));
  }
  basis.validate();
  return basis;
}

nlohmann::json MonomialBasis::to_json() const {
  nlohmann::ordered_json out;
  out["variables"] = nlohmann::json::array();
  for (const auto& v : variables) {
    out["variables"].push_back(v.name + "=" + v.recipe.to_string() + "@" + print_expr(v.power));
  }
  out["monomials"] = monomials;
  return out;
}

void MonomialBasis::validate() const {
  if (variables.empty()) throw UsageError("basis has no variables");
  if (monomials.size() < 2) throw UsageError("basis needs at least two monomials");
  if (monomials.size() > kMaxBasisSize) {
    throw UsageError("basis has " + std::to_string(monomials.size()) + " monomials, limit is " +
                     std::to_string(kMaxBasisSize));
  }
  std::vector<std::vector<int>> sorted = monomials;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("basis lists a monomial twice");
  }
  for (const auto& m : monomials) {
    if (m.size() != variables.size()) throw UsageError("monomial exponent count does not match the variables");
    for (int e : m) {
      if (std::abs(e) > kMaxBasisExponent) {
        throw UsageError("monomial exponent " + std::to_string(e) + " exceeds " + std::to_string(kMaxBasisExponent));
      }
    }
  }
}

std::vector<BigReal> default_discovery_samples(size_t count, mpfr_prec_t bits) {
  std::vector<BigReal> out;
  if (count == 0) return out;
  if (count == 1) {
    out.push_back(BigReal::from_rational(3, 10, bits));
    return out;
  }
  const long span = static_cast<long>(count - 1);
  for (long i = 0; i < static_cast<long>(count); ++i) {
    // 0.06 + 0.44 i/(count-1)
    out.push_back(BigReal::from_rational(6 * span + 44 * i, 100 * span, bits));
  }
  return out;
}

std::vector<ZSqrt2> normalize_coefficients(std::vector<ZSqrt2> coeffs) {
  ZSqrt2 g{0, 0};
  for (const auto& c : coeffs) g = gcd(g, c);
  if (g.is_zero()) return coeffs;
  for (auto& c : coeffs) c = divide_exact(c, g);

  std::vector<ZSqrt2> best = coeffs;
  auto score = [](const std::vector<ZSqrt2>& cs, int k) {
    std::int64_t max_h = 0;
    std::int64_t sum_h = 0;
    for (const auto& c : cs) {
      max_h = std::max(max_h, c.height());
      sum_h += c.height();
    }
    return std::make_tuple(max_h, sum_h, std::abs(k), k < 0);
  };
  auto best_score = score(coeffs, 0);
  for (int k = -8; k <= 8; ++k) {
    if (k == 0) continue;
    std::vector<ZSqrt2> cand = coeffs;
    const ZSqrt2 u = unit_power(k);
    for (auto& c : cand) c = c * u;
    const auto s = score(cand, k);
    if (s < best_score) {
      best_score = s;
      best = std::move(cand);
    }
  }
  for (const auto& c : best) {
    if (c.is_zero()) continue;
    if (sign_of(c) < 0) {
      for (auto& x : best) x = -x;
    }
    break;
  }
  return best;
}

DiscoveryOutcome discover_relation(const MonomialBasis& basis, const std::vector<BigReal>& q_samples,
                                   const Precision& prec, int coeff_bound) {
  basis.validate();
  if (q_samples.size() < basis.monomials.size() + 5) {
    throw UsageError("discovery needs at least " + std::to_string(basis.monomials.size() + 5) + " sample nomes, got " +
                     std::to_string(q_samples.size()));
  }
  if (prec.digits < kMinDiscoveryDigits) {
    throw UsageError("discovery needs at least " + std::to_string(kMinDiscoveryDigits) + " digits");
  }
  if (coeff_bound < 1) throw UsageError("coefficient bound must be at least 1");

  Precision current = prec;
  DiscoveryOutcome result;
  for (int round = 0; round < 2; ++round) {
    const Attempt a = attempt(basis, q_samples, current, coeff_bound);
    result.digits_used = current.digits;
    result.note = a.note;
    if (a.status == AttemptStatus::found) {
      result.relation = relation_from(basis, a.coeffs);
      result.held_out_residual = a.held_out_residual;
      return result;
    }
    if (a.status == AttemptStatus::none) return result;
    if (round == 1) {
      if (a.status == AttemptStatus::ambiguous) {
        throw IllConditioned("sample matrix is ill-conditioned at " + std::to_string(current.digits) +
                             " digits (" + a.note + "); retry with more digits");
      }
      return result;
    }
    current = Precision(2 * current.digits, current.guard);
  }
  return result;
}

std::optional<Relation> find_relation(const MonomialBasis& basis, const std::vector<BigReal>& q_samples,
                                      const Precision& prec, int coeff_bound) {
  return discover_relation(basis, q_samples, prec, coeff_bound).relation;
}

}  // namespace theta_forge
