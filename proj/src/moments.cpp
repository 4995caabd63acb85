#include "linesum/moments.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "linesum/error.hpp"
#include "linesum/numeric.hpp"
#include "linesum/parallel.hpp"

namespace linesum {

MomentCoefficients MomentCoefficients::zeros(int N, double Ahat, double eps_hat) {
  MomentCoefficients mc;
  mc.N = N;
  mc.Ahat = Ahat;
  mc.eps_hat = eps_hat;
  mc.a.assign(N, 0.0);
  mc.B.assign(N, 0.0);
  mc.C = CMatrix(N);
  mc.E.assign(N, 0.0);
  mc.F = CMatrix(N);
  mc.J.assign(N, 0.0);
  return mc;
}

MomentCoefficients MomentCoefficients::scaled(double factor) const {
  MomentCoefficients out = *this;
  for (auto* v : {&out.a, &out.B, &out.E, &out.J}) {
    for (auto& x : *v) x *= factor;
  }
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      out.C(j, k) *= factor;
      out.F(j, k) *= factor;
    }
  }
  return out;
}

void MomentCoefficients::validate() const {
  if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  if (!(Ahat > 0.0)) throw Error(ErrorKind::InvalidInput, "Ahat must be positive");
  if (!(eps_hat > 0.0 && eps_hat < 0.5)) {
    throw Error(ErrorKind::InvalidInput, "eps_hat must lie in (0, 1/2)");
  }
  const auto n = static_cast<std::size_t>(N);
  if (a.size() != n || B.size() != n || E.size() != n || J.size() != n || C.size() != N ||
      F.size() != N) {
    throw Error(ErrorKind::InvalidInput, "coefficient arrays must have dimension N");
  }
}

double MomentCoefficients::box_half_width() const {
  return std::pow(static_cast<double>(N), -0.5 + eps_hat);
}

cplx theta1(const MomentCoefficients& mc) {
  mc.validate();
  const int N = mc.N;
  const double A = mc.Ahat;
  const double Nd = N;
  cplx sa, sa2, sb2, sbc, scc, se, sf;
  for (int j = 0; j < N; ++j) {
    sa += mc.a[j];
    sa2 += mc.a[j] * mc.a[j];
    sb2 += mc.B[j] * mc.B[j];
    se += mc.E[j];
    cplx crow;
    for (int k = 0; k < N; ++k) {
      sbc += mc.B[j] * mc.C(j, k);
      sf += mc.F(j, k);
      crow += mc.C(j, k);
    }
    // sum_{k,l} C_jk C_jl = (sum_k C_jk)^2
    scc += crow * crow;
  }
  return sa / (2.0 * A * Nd) + sa2 / (4.0 * A * A * Nd * Nd) +
         15.0 * sb2 / (16.0 * A * A * A * Nd) + 3.0 * sbc / (8.0 * A * A * A * Nd * Nd) +
         scc / (16.0 * A * A * A * Nd * Nd * Nd) + 3.0 * se / (4.0 * A * A * Nd) +
         sf / (4.0 * A * A * Nd * Nd);
}

cplx theta2(const MomentCoefficients& mc) {
  mc.validate();
  const int N = mc.N;
  const double A = mc.Ahat;
  const double Nd = N;
  const double A2 = A * A;
  const double A3 = A2 * A;
  const double A4 = A3 * A;
  cplx t_a3, t_ae, t_ab2, t_af, t_bj, t_cj, t_acc, t_abc;
  for (int j = 0; j < N; ++j) {
    const cplx aj = mc.a[j];
    t_a3 += aj * aj * aj;
    t_ae += aj * mc.E[j];
    t_ab2 += aj * mc.B[j] * mc.B[j];
    t_bj += mc.B[j] * mc.J[j];
    cplx crow;
    for (int k = 0; k < N; ++k) crow += mc.C(j, k);
    for (int k = 0; k < N; ++k) {
      const cplx ak = mc.a[k];
      t_af += (aj + ak) * mc.F(j, k);
      t_cj += mc.C(j, k) * mc.J[j];
      // sum_l (a_j + 2 a_k) C_jk C_jl
      t_acc += (aj + 2.0 * ak) * mc.C(j, k) * crow;
      t_abc += (2.0 * aj + ak) * mc.B[j] * mc.C(j, k);
    }
  }
  return t_a3 / (6.0 * A3 * Nd * Nd * Nd) + 3.0 * t_ae / (2.0 * A3 * Nd * Nd) +
         45.0 * t_ab2 / (16.0 * A4 * Nd * Nd) + t_af / (4.0 * A3 * Nd * Nd * Nd) +
         3.0 * t_bj / (4.0 * A2 * Nd) + t_cj / (4.0 * A2 * Nd * Nd) +
         t_acc / (16.0 * A4 * Nd * Nd * Nd * Nd) + 3.0 * t_abc / (8.0 * A4 * Nd * Nd * Nd);
}

double bigZ(const MomentCoefficients& mc) {
  mc.validate();
  const int N = mc.N;
  const double A = mc.Ahat;
  const double Nd = N;
  double sa2 = 0.0, sb2 = 0.0, sbc = 0.0, scc = 0.0;
  for (int j = 0; j < N; ++j) {
    const double ia = mc.a[j].imag();
    const double ib = mc.B[j].imag();
    sa2 += ia * ia;
    sb2 += ib * ib;
    double crow = 0.0;
    for (int k = 0; k < N; ++k) crow += mc.C(j, k).imag();
    sbc += ib * crow;
    scc += crow * crow;
  }
  const double exponent = sa2 / (4.0 * A * A * Nd * Nd) + 15.0 * sb2 / (16.0 * A * A * A * Nd) +
                          3.0 * sbc / (8.0 * A * A * A * Nd * Nd) +
                          scc / (16.0 * A * A * A * Nd * Nd * Nd);
  return std::exp(exponent);
}

cplx mw3_estimate(const MomentCoefficients& mc) {
  mc.validate();
  const double Nd = mc.N;
  return 0.5 * Nd * std::log(kPi / (mc.Ahat * Nd)) + theta1(mc) + theta2(mc);
}

cplx mw3_exponent(const MomentCoefficients& mc, const std::vector<double>& z) {
  const int N = mc.N;
  const double Nd = N;
  cplx acc;
  double sq = 0.0;
  for (int j = 0; j < N; ++j) {
    const double z1 = z[j];
    const double z2 = z1 * z1;
    sq += z2;
    acc += mc.a[j] * z2 + Nd * mc.B[j] * (z2 * z1) + Nd * mc.E[j] * (z2 * z2) + mc.J[j] * z1;
    for (int k = 0; k < N; ++k) {
      const double zk2 = z[k] * z[k];
      acc += mc.C(j, k) * (z1 * zk2) + mc.F(j, k) * (z2 * zk2);
    }
  }
  return acc - mc.Ahat * Nd * sq;
}

cplx integrate_f_direct(const MomentCoefficients& mc, int nodes_per_dim, int threads) {
  mc.validate();
  const int N = mc.N;
  if (N > 4) throw Error(ErrorKind::ResourceLimit, "direct quadrature limited to N <= 4");
  int nodes = std::max(nodes_per_dim, 3);
  if (nodes % 2 == 0) ++nodes;
  if (std::pow(static_cast<double>(nodes), N) > 1e9) {
    throw Error(ErrorKind::ResourceLimit, "direct quadrature exceeds 1e9 nodes");
  }
  const double h = mc.box_half_width();
  const double step = 2.0 * h / (nodes - 1);
  std::vector<double> x(nodes);
  std::vector<double> w(nodes);
  for (int i = 0; i < nodes; ++i) {
    x[i] = -h + step * i;
    w[i] = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] *= step / 3.0;
  }
  std::vector<cplx> partial(nodes);
  parallel_blocks(static_cast<std::size_t>(nodes), threads, [&](std::size_t block) {
    std::vector<int> idx(N, 0);
    idx[0] = static_cast<int>(block);
    std::vector<double> z(N);
    cplx local;
    while (true) {
      double weight = 1.0;
      for (int d = 0; d < N; ++d) {
        z[d] = x[idx[d]];
        weight *= w[idx[d]];
      }
      local += weight * std::exp(mw3_exponent(mc, z));
      int pos = N - 1;
      while (pos >= 1 && ++idx[pos] == nodes) idx[pos--] = 0;
      if (pos < 1) break;
    }
    partial[block] = local;
  });
  return tree_sum(std::move(partial));
}

double gaussian_box_integral(int N, double Ahat, double eps_hat) {
  const double scale = Ahat * N;
  const double h = std::pow(static_cast<double>(N), -0.5 + eps_hat);
  const double one_dim = std::sqrt(kPi / scale) * std::erf(h * std::sqrt(scale));
  return std::pow(one_dim, N);
}

MomentCoefficients mw3_row_block(const SaddleSolution& sol, int m, int n, double eps_hat) {
  if (m < 2 || n < 2) throw Error(ErrorKind::DomainError, "row block needs m, n >= 2");
  const int N = m - 1;
  const double A = sol.A;
  const double c = -1.0 / (m + std::sqrt(static_cast<double>(m)));
  const cplx I(0.0, 1.0);
  MomentCoefficients mc = MomentCoefficients::zeros(N, A * n / N, eps_hat);
  for (int j = 0; j < N; ++j) {
    double alpha = 0.0;
    double beta = 0.0;
    for (int k = 0; k < n - 1; ++k) {
      alpha += sol.alpha_jk(j, k);
      beta += sol.beta_jk(j, k);
    }
    mc.a[j] = -alpha;
    mc.B[j] = -I * (sol.A3 * n + beta) / static_cast<double>(N);
    mc.E[j] = sol.A4 * n / N;
    for (int k = 0; k < N; ++k) {
      mc.C(j, k) = -3.0 * I * sol.A3 * c * static_cast<double>(n);
      mc.F(j, k) = -9.0 * sol.A3 * sol.A3 * n / (4.0 * A * m);
    }
  }
  return mc;
}

MomentCoefficients mw3_column_block(const SaddleSolution& sol, int m, int n, double eps_hat) {
  if (m < 2 || n < 2) throw Error(ErrorKind::DomainError, "column block needs m, n >= 2");
  const int N = n - 1;
  const double A = sol.A;
  const double d = -1.0 / (n + std::sqrt(static_cast<double>(n)));
  const cplx I(0.0, 1.0);
  const double shift =
      3.0 * sol.A4 * m / (A * n) - 9.0 * sol.A3 * sol.A3 * m / (4.0 * A * A * n);
  MomentCoefficients mc = MomentCoefficients::zeros(N, A * m / N, eps_hat);
  for (int k = 0; k < N; ++k) {
    double alpha = 0.0;
    double beta = 0.0;
    for (int j = 0; j < m - 1; ++j) {
      alpha += sol.alpha_jk(j, k);
      beta += sol.beta_jk(j, k);
    }
    mc.a[k] = shift - alpha;
    mc.B[k] = -I * (sol.A3 * m + beta) / static_cast<double>(N);
    mc.E[k] = sol.A4 * m / N;
    for (int l = 0; l < N; ++l) {
      mc.C(k, l) = -3.0 * I * sol.A3 * d * static_cast<double>(m);
      mc.F(k, l) = -9.0 * sol.A3 * sol.A3 * m / (4.0 * A * n);
    }
  }
  return mc;
}

namespace {

using nlohmann::json;

cplx read_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(ErrorKind::InvalidInput, "complex values must be [re, im] pairs");
}

void read_vector(const json& doc, const char* key, std::vector<cplx>& out, int N) {
  if (!doc.contains(key)) return;
  const auto& arr = doc.at(key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != N) {
    throw Error(ErrorKind::InvalidInput, std::string("\"") + key + "\" must have N entries");
  }
  for (int j = 0; j < N; ++j) out[j] = read_complex(arr[j]);
}

void read_matrix(const json& doc, const char* key, CMatrix& out, int N) {
  if (!doc.contains(key)) return;
  const auto& rows = doc.at(key);
  if (!rows.is_array() || static_cast<int>(rows.size()) != N) {
    throw Error(ErrorKind::InvalidInput, std::string("\"") + key + "\" must be N x N");
  }
  for (int j = 0; j < N; ++j) {
    if (!rows[j].is_array() || static_cast<int>(rows[j].size()) != N) {
      throw Error(ErrorKind::InvalidInput, std::string("\"") + key + "\" must be N x N");
    }
    for (int k = 0; k < N; ++k) out(j, k) = read_complex(rows[j][k]);
  }
}

json write_complex(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

MomentCoefficients parse_coefficients_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed coefficients JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::InvalidInput, "coefficients must be an object");
  static const char* const kKeys[] = {"N", "Ahat", "eps_hat", "a", "B", "C", "E", "F", "J"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), item.key()) == std::end(kKeys)) {
      throw Error(ErrorKind::InvalidInput, "unexpected key \"" + item.key() + "\"");
    }
  }
  if (!doc.contains("N") || !doc["N"].is_number_integer() || !doc.contains("Ahat") ||
      !doc["Ahat"].is_number()) {
    throw Error(ErrorKind::InvalidInput, "coefficients need integer \"N\" and numeric \"Ahat\"");
  }
  const int N = doc["N"].get<int>();
  if (N < 1 || N > 64) throw Error(ErrorKind::InvalidInput, "N must lie in [1, 64]");
  const double eps_hat = doc.contains("eps_hat") ? doc["eps_hat"].get<double>() : 0.25;
  MomentCoefficients mc = MomentCoefficients::zeros(N, doc["Ahat"].get<double>(), eps_hat);
  read_vector(doc, "a", mc.a, N);
  read_vector(doc, "B", mc.B, N);
  read_matrix(doc, "C", mc.C, N);
  read_vector(doc, "E", mc.E, N);
  read_matrix(doc, "F", mc.F, N);
  read_vector(doc, "J", mc.J, N);
  mc.validate();
  return mc;
}

std::string coefficients_to_json(const MomentCoefficients& mc) {
  json doc;
  doc["N"] = mc.N;
  doc["Ahat"] = mc.Ahat;
  doc["eps_hat"] = mc.eps_hat;
  auto vec = [](const std::vector<cplx>& v) {
    json arr = json::array();
    for (auto z : v) arr.push_back(write_complex(z));
    return arr;
  };
  auto mat = [&](const CMatrix& m) {
    json rows = json::array();
    for (int j = 0; j < m.size(); ++j) {
      json row = json::array();
      for (int k = 0; k < m.size(); ++k) row.push_back(write_complex(m(j, k)));
      rows.push_back(row);
    }
    return rows;
  };
  doc["a"] = vec(mc.a);
  doc["B"] = vec(mc.B);
  doc["C"] = mat(mc.C);
  doc["E"] = vec(mc.E);
  doc["F"] = mat(mc.F);
  doc["J"] = vec(mc.J);
  return doc.dump();
}

}  // namespace linesum
