#include "qdzip/zipper.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "qdzip/bergman.hpp"

namespace qdzip {

namespace {

using nlohmann::ordered_json;

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

cplx complex_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) throw IoError("archive: malformed complex value");
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json pp_json(const PrincipalPart& p) {
  ordered_json jp;
  jp["w"] = complex_json(p.pole);
  ordered_json arr = ordered_json::array();
  for (cplx c : p.coeffs) arr.push_back(complex_json(c));
  jp["p"] = arr;
  return jp;
}

PrincipalPart pp_from(const ordered_json& j) {
  PrincipalPart p;
  p.pole = complex_from(j.at("w"));
  for (const auto& c : j.at("p")) p.coeffs.push_back(complex_from(c));
  return p;
}

ordered_json archive_json_tree(const ZipArchive& ar) {
  ordered_json j;
  ordered_json curves = ordered_json::array();
  for (const auto& cs : ar.g_coeffs) {
    ordered_json one = ordered_json::array();
    for (cplx c : cs) one.push_back(complex_json(c));
    curves.push_back(one);
  }
  j["g_coeffs"] = curves;
  ordered_json hp = ordered_json::array();
  for (const auto& p : ar.h_poles) hp.push_back(pp_json(p));
  j["h_poles"] = hp;
  ordered_json rp = ordered_json::array();
  for (const auto& p : ar.refl_poles) rp.push_back(pp_json(p));
  j["H_poles"] = rp;
  j["meta"] = {{"n", ar.connectivity},
               {"grid", ar.grid},
               {"variant", ar.variant},
               {"base", complex_json(ar.base)},
               {"checksum", ""}};
  return j;
}

// Laurent coefficients q_1..q_3 of f about p on the circle of radius rho.
std::array<cplx, 3> laurent_ring(const std::function<cplx(cplx)>& f, cplx p, double rho) {
  const int K = 256;
  std::array<cplx, 3> q{};
  for (int l = 0; l < K; ++l) {
    cplx dir = std::exp(cplx(0, TWO_PI * l / K));
    cplx fz = f(p + rho * dir) / static_cast<double>(K);
    cplx fac = rho * dir;
    for (int m = 0; m < 3; ++m) {
      fz *= fac;
      q[m] += fz;
    }
  }
  return q;
}

std::vector<std::pair<int, int>> monomial_index(int degree) {
  std::vector<std::pair<int, int>> st;
  for (int s = 0; s <= degree; ++s)
    for (int t = 0; s + t <= degree; ++t) st.emplace_back(s, t);
  return st;
}

Eigen::MatrixXcd monomial_matrix(const std::vector<std::pair<cplx, cplx>>& uv,
                                 const std::vector<std::pair<int, int>>& st) {
  Eigen::MatrixXcd v(uv.size(), st.size());
  for (std::size_t i = 0; i < uv.size(); ++i) {
    for (std::size_t j = 0; j < st.size(); ++j) {
      cplx m = 1.0;
      for (int s = 0; s < st[j].first; ++s) m *= uv[i].first;
      for (int t = 0; t < st[j].second; ++t) m *= uv[i].second;
      v(i, j) = m;
    }
  }
  return v;
}

}  // namespace

cplx PrincipalPart::eval(cplx z) const {
  cplx s = 0, d = z - pole, pw = 1.0;
  for (cplx c : coeffs) {
    pw *= d;
    s += c / pw;
  }
  return s;
}

ZipArchive pack(const GustafssonMap& map, const QuadratureData& data) {
  const Domain& dom = map.domain();
  ZipArchive ar;
  ar.connectivity = dom.connectivity();
  ar.grid = dom.grid();
  ar.variant = map.variant() == GustafssonMap::Variant::scattered ? "scattered" : "clustered";
  ar.base = map.base();
  for (int k = 0; k < dom.connectivity(); ++k)
    ar.g_coeffs.push_back(map.image_domain().curve(k).coeffs());

  for (const QuadratureNode& n : data.nodes) {
    PrincipalPart p;
    p.pole = n.node;
    double fact = 1;
    for (std::size_t m = 0; m < n.weights.size(); ++m) {
      if (m > 1) fact *= static_cast<double>(m);
      p.coeffs.push_back(n.weights[m] * fact / PI);
    }
    while (p.coeffs.size() > 1 && std::abs(p.coeffs.back()) == 0) p.coeffs.pop_back();
    ar.h_poles.push_back(std::move(p));
  }

  auto refl = [&map](cplx z) { return map.refl_eval(z); };
  const std::vector<cplx>& poles = map.refl_poles();
  std::vector<std::array<cplx, 3>> qs(poles.size());
  for (std::size_t j = 0; j < poles.size(); ++j) {
    cplx p = poles[j];
    double sep = std::numeric_limits<double>::max();
    for (std::size_t l = 0; l < poles.size(); ++l)
      if (l != j) sep = std::min(sep, std::abs(p - poles[l]));
    double rho = 0.3 * std::min(dom.distance_to_boundary(p), 0.5 * sep);
    if (!(rho > 1e-10 * dom.diameter()))
      throw ConstructionError("principal-part extraction: pole radius collapsed");
    std::array<cplx, 3> a = laurent_ring(refl, p, rho);
    std::array<cplx, 3> b = laurent_ring(refl, p, rho / 2);
    double defect = 0;
    for (int m = 0; m < 3; ++m) defect = std::max(defect, std::abs(a[m] - b[m]));
    if (defect > 1e-8 * std::max(1.0, std::abs(b[0])))
      throw ConstructionError("principal-part extraction unstable under radius sweep");
    qs[j] = b;
  }
  double peak = 0;
  for (const auto& q : qs) peak = std::max(peak, std::abs(q[0]));
  double trim = 1e-12 * std::max(1.0, peak);
  for (std::size_t j = 0; j < poles.size(); ++j) {
    PrincipalPart p;
    p.pole = poles[j];
    int order = 0;
    for (int m = 3; m >= 1; --m)
      if (std::abs(qs[j][m - 1]) > trim) {
        order = m;
        break;
      }
    if (order == 0) continue;  // negligible pole, not archived
    for (int m = 0; m < order; ++m) p.coeffs.push_back(qs[j][m]);
    ar.refl_poles.push_back(std::move(p));
  }

  double nn = static_cast<double>(dom.connectivity()) * dom.grid();
  ar.raw_bytes = 16.0 * nn * nn;
  ar.compressed_bytes = static_cast<double>(archive_to_json(ar).size());
  return ar;
}

std::string archive_to_json(const ZipArchive& ar) {
  ordered_json j = archive_json_tree(ar);
  std::string body = j.dump();
  j["meta"]["checksum"] = fnv_hex(body);
  return j.dump(2);
}

ZipArchive archive_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw IoError(std::string("archive parse: ") + e.what());
  }
  try {
    std::string cs = j.at("meta").at("checksum").get<std::string>();
    j["meta"]["checksum"] = "";
    if (fnv_hex(j.dump()) != cs) throw IoError("archive checksum mismatch");

    ZipArchive ar;
    ar.connectivity = j.at("meta").at("n").get<int>();
    ar.grid = j.at("meta").at("grid").get<int>();
    ar.variant = j.at("meta").at("variant").get<std::string>();
    ar.base = complex_from(j.at("meta").at("base"));
    for (const auto& curve : j.at("g_coeffs")) {
      std::vector<cplx> cs_one;
      for (const auto& c : curve) cs_one.push_back(complex_from(c));
      ar.g_coeffs.push_back(std::move(cs_one));
    }
    for (const auto& p : j.at("h_poles")) ar.h_poles.push_back(pp_from(p));
    for (const auto& p : j.at("H_poles")) ar.refl_poles.push_back(pp_from(p));
    ar.compressed_bytes = static_cast<double>(text.size());
    double nn = static_cast<double>(ar.connectivity) * ar.grid;
    ar.raw_bytes = 16.0 * nn * nn;
    return ar;
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("archive schema: ") + e.what());
  }
}

Domain archive_image_domain(const ZipArchive& ar) {
  std::vector<Curve> curves;
  for (const auto& cs : ar.g_coeffs) curves.emplace_back(cs);
  return Domain(std::move(curves), ar.grid);
}

BoundaryFunction archive_g_trace(const ZipArchive& ar, const Domain& dom) {
  if (static_cast<int>(ar.g_coeffs.size()) != dom.connectivity())
    throw IoError("archive does not match the domain's connectivity");
  int N = dom.grid();
  std::vector<std::vector<cplx>> samples(dom.connectivity());
  for (int k = 0; k < dom.connectivity(); ++k) {
    Curve c(ar.g_coeffs[k]);
    samples[k].resize(N);
    for (int i = 0; i < N; ++i) samples[k][i] = c.point(TWO_PI * i / N);
  }
  return BoundaryFunction(dom, std::move(samples));
}

cplx q_transform(const Domain& image, cplx z) {
  BoundaryFunction conj_trace =
      BoundaryFunction::from_callable(image, [](cplx w) { return std::conj(w); });
  return cauchy_eval(conj_trace, z);
}

cplx unzip_h(const ZipArchive& ar, const Domain& image, cplx z) {
  cplx s = q_transform(image, z);
  for (const PrincipalPart& p : ar.h_poles) s += p.eval(z);
  return s;
}

cplx unzip_gprime(const ZipArchive& ar, const Domain& dom, cplx z) {
  return cauchy_derivative_eval(archive_g_trace(ar, dom), z, 1);
}

cplx unzip_refl(const ZipArchive& ar, const Domain& dom, cplx z) {
  cplx s = cauchy_eval(archive_g_trace(ar, dom).conjugated(), z);
  for (const PrincipalPart& p : ar.refl_poles) s += p.eval(z);
  return s;
}

double bergman_pullback_residual(const ZipArchive& ar, const Domain& dom,
                                 const std::vector<std::pair<cplx, cplx>>& pairs,
                                 unsigned threads) {
  KernelSolver s_dom(dom, threads);
  BergmanKernel k_dom(s_dom, threads);
  Domain img = archive_image_domain(ar);
  KernelSolver s_img(img, threads);
  BergmanKernel k_img(s_img, threads);
  BoundaryFunction g = archive_g_trace(ar, dom);

  double worst = 0;
  for (const auto& [z, w] : pairs) {
    cplx gz = cauchy_eval(g, z), gw = cauchy_eval(g, w);
    cplx gpz = cauchy_derivative_eval(g, z, 1), gpw = cauchy_derivative_eval(g, w, 1);
    cplx lhs = k_dom.eval(z, w);
    cplx rhs = gpz * std::conj(gpw) * k_img.eval(gz, gw);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

cplx AlgebraicRelation::eval(cplx u, cplx v) const {
  cplx acc = 0, up = 1.0;
  for (int s = 0; s <= degree; ++s) {
    cplx vp = 1.0;
    for (int t = 0; t <= degree; ++t) {
      acc += coeffs[s * (degree + 1) + t] * up * vp;
      vp *= v;
    }
    up *= u;
  }
  return acc;
}

AlgebraicRelation fit_algebraic_relation(
    const std::vector<std::pair<cplx, cplx>>& uv, int degree) {
  auto st = monomial_index(degree);
  if (uv.size() < 3 * static_cast<std::size_t>((degree + 1) * (degree + 1)))
    throw ConstructionError("relation fit: not enough samples for the degree");
  Eigen::MatrixXcd v = monomial_matrix(uv, st);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(v, Eigen::ComputeThinV);
  Eigen::VectorXcd q = svd.matrixV().col(static_cast<int>(st.size()) - 1);

  AlgebraicRelation rel;
  rel.degree = degree;
  rel.coeffs.assign((degree + 1) * (degree + 1), cplx(0));
  for (std::size_t j = 0; j < st.size(); ++j)
    rel.coeffs[st[j].first * (degree + 1) + st[j].second] = q[j];
  rel.sigma_min = svd.singularValues()[static_cast<int>(st.size()) - 1];
  rel.sigma_max = svd.singularValues()[0];
  Eigen::VectorXcd r = v * q;
  for (int i = 0; i < r.size(); ++i) rel.residual = std::max(rel.residual, std::abs(r[i]));
  bool has_u = false, has_v = false;
  for (std::size_t j = 0; j < st.size(); ++j) {
    if (std::abs(q[j]) <= 1e-8) continue;
    if (st[j].first > 0) has_u = true;
    if (st[j].second > 0) has_v = true;
  }
  rel.mixed = has_u && has_v;
  return rel;
}

AlgebraicRelation fit_relation_search(
    const std::vector<std::pair<cplx, cplx>>& uv, int max_degree) {
  AlgebraicRelation best;
  double best_ratio = std::numeric_limits<double>::max();
  // Baseline: the relation-free smallest singular value at degree 1. The
  // collapse test is cumulative against it, so a relation surfacing over
  // several degree steps is still detected.
  double baseline = -1;
  for (int d = 1; d <= max_degree; ++d) {
    if (uv.size() < 3 * static_cast<std::size_t>((d + 1) * (d + 1))) break;
    AlgebraicRelation rel = fit_algebraic_relation(uv, d);
    if (baseline < 0) baseline = rel.sigma_min;
    rel.drop = baseline > 0 ? rel.sigma_min / baseline : 0.0;
    if (rel.drop <= 1e-6 || rel.sigma_min <= 1e-10 * rel.sigma_max) {
      rel.decisive = true;
      return rel;
    }
    double ratio = rel.sigma_min / std::max(rel.sigma_max, 1e-300);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = rel;
    }
  }
  best.decisive = false;
  return best;
}

QuotientRelation fit_quotient_relation(const std::vector<cplx>& u,
                                       const std::vector<cplx>& z, int degree) {
  if (u.size() != z.size()) throw ConstructionError("quotient fit: sample size mismatch");
  std::vector<std::pair<cplx, cplx>> zz(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) zz[i] = {z[i], std::conj(z[i])};
  auto st = monomial_index(degree);
  if (z.size() < 3 * static_cast<std::size_t>((degree + 1) * (degree + 1)))
    throw ConstructionError("quotient fit: not enough samples for the degree");
  Eigen::MatrixXcd v = monomial_matrix(zz, st);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-10 * sv[0]) ++rank;
  if (rank == 0) throw ConstructionError("quotient fit: degenerate sample matrix");
  Eigen::MatrixXcd b = svd.matrixU().leftCols(rank) * sv.head(rank).asDiagonal();

  Eigen::MatrixXcd m(v.rows(), 2 * rank);
  m.leftCols(rank) = b;
  for (int i = 0; i < v.rows(); ++i)
    m.row(i).tail(rank) = -u[i] * b.row(i);
  Eigen::BDCSVD<Eigen::MatrixXcd> msvd(m, Eigen::ComputeThinV);
  Eigen::VectorXcd y = msvd.matrixV().col(2 * rank - 1);

  Eigen::VectorXcd q1 = svd.matrixV().leftCols(rank) * y.head(rank);
  Eigen::VectorXcd q2 = svd.matrixV().leftCols(rank) * y.tail(rank);
  QuotientRelation rel;
  rel.degree = degree;
  rel.num_coeffs.assign((degree + 1) * (degree + 1), cplx(0));
  rel.den_coeffs.assign((degree + 1) * (degree + 1), cplx(0));
  for (std::size_t j = 0; j < st.size(); ++j) {
    rel.num_coeffs[st[j].first * (degree + 1) + st[j].second] = q1[j];
    rel.den_coeffs[st[j].first * (degree + 1) + st[j].second] = q2[j];
  }
  Eigen::VectorXcd r = m * y;
  for (int i = 0; i < r.size(); ++i) rel.residual = std::max(rel.residual, std::abs(r[i]));
  rel.den_norm = y.tail(rank).norm();
  return rel;
}

}  // namespace qdzip
