// Release acceptance gate. Every criterion prints exactly one verdict line;
// the process exit code is the number of failed criteria, so a clean run
// exits 0. Criteria are independent: an exception inside one is caught and
// reported as its failure without stopping the rest.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdzip/bergman.hpp"
#include "qdzip/domain_io.hpp"
#include "qdzip/gustafsson.hpp"
#include "qdzip/kernels.hpp"
#include "qdzip/testdomains.hpp"
#include "qdzip/zipper.hpp"
#include "test_util.hpp"

using namespace qdzip;
using qdzip_test::dist;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s - %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename F>
void criterion(int n, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(n, false, std::string("threw: ") + e.what());
  }
}

std::string num(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", x);
  return b;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(QDZIP_CLI_PATH) + " " + args +
                    " >acceptance_work/cli_log.txt 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Shared heavy state: the annulus solver and the tolerance sweep of maps,
// reused by the archive and relation criteria.
struct SweepEntry {
  GustafssonMap map;
  QuadratureData data;
  double worst_residual;
};

}  // namespace

int main() {
  // ---- 1: disc kernels against closed forms --------------------------------
  criterion(1, [] {
    Domain dom = disc_domain(256);
    KernelSolver solver(dom, 2);
    DiscOracle orc;
    cplx a(0.3, 0.0);
    SzegoField sf = solver.szego(a);
    GarabedianField lf(sf);
    AhlforsMap fa(sf, lf);
    BergmanKernel kb(solver, 2);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0;
    int got = 0;
    while (got < 50) {
      cplx z(u(rng), u(rng));
      if (std::abs(z) > 0.9 || std::abs(z - a) < 0.2) continue;
      ++got;
      worst = std::max(worst, dist(sf.eval(z), orc.szego(z, a)));
      worst = std::max(worst, dist(lf.eval(z), orc.garabedian(z, a)));
      worst = std::max(worst, dist(kb.eval(z, a), orc.bergman(z, a)));
      worst = std::max(worst, dist(fa.eval(z), orc.ahlfors(z, a)));
    }
    verdict(1, worst <= 1e-8,
            "disc S, L, K, Ahlfors at 50 interior points, worst " + num(worst));
  });

  // ---- 2: annulus kernels against series / closed forms --------------------
  criterion(2, [] {
    Domain dom = annulus_domain(0.5, 256);
    KernelSolver solver(dom, 2);
    AnnulusOracle orc(0.5);
    cplx a(0.7, 0.0);
    SzegoField sf = solver.szego(a);
    BergmanKernel kb(solver, 2);
    std::vector<cplx> pts = qdzip_test::interior_samples(dom, 5, 20, 0.1, {a}, 0.1);
    double worst_s = 0, worst_k = 0, worst_f = 0;
    for (cplx z : pts) {
      worst_s = std::max(worst_s, dist(sf.eval(z), orc.szego(z, a)));
      worst_k = std::max(worst_k, dist(kb.eval(z, a), orc.bergman(z, a)));
      worst_f = std::max(worst_f, dist(kb.f_prime(0, z), orc.f1_prime(z)));
    }
    double p_err = std::abs(kb.periods()(0, 0) - orc.period11());
    bool ok = pts.size() >= 20 && worst_s <= 1e-6 && worst_k <= 1e-6 &&
              worst_f <= 1e-8 && p_err <= 1e-6;
    verdict(2, ok, "annulus S " + num(worst_s) + ", K " + num(worst_k) + ", F1' " +
                       num(worst_f) + ", period " + num(p_err));
  });

  // ---- 3: boundary identity and Ahlfors invariants on three domains --------
  criterion(3, [] {
    std::vector<std::pair<std::string, Domain>> doms;
    doms.emplace_back("disc", disc_domain(256));
    doms.emplace_back("annulus", annulus_domain(0.5, 256));
    doms.emplace_back("blob3", blob_domain(3, 7, 256));
    bool ok = true;
    std::string detail;
    for (auto& [name, dom] : doms) {
      KernelSolver solver(dom, 2);
      cplx a = qdzip_test::pick_deep_point(dom);
      SzegoField sf = solver.szego(a);
      GarabedianField lf(sf);
      AhlforsMap fa(sf, lf);
      double identity = 0;
      for (int k = 0; k < dom.connectivity(); ++k) {
        auto dz = dom.dpoints(k);
        for (int i = 0; i < dom.grid(); ++i) {
          cplx tangent = dz[i] / std::abs(dz[i]);
          identity = std::max(
              identity, std::abs(lf.trace().sample(k, i) * tangent / cplx(0, 1) -
                                 std::conj(sf.trace().sample(k, i))));
        }
      }
      double fpa_target = TWO_PI * sf.at_base();
      double fpa_rel = std::abs(fa.derivative_at_base() - fpa_target) / fpa_target;
      bool dom_ok = identity <= 1e-8 && std::abs(fa.eval(a)) <= 1e-10 &&
                    fpa_rel <= 1e-6 && fa.max_modulus_defect() <= 1e-8 &&
                    fa.boundary_winding() == dom.connectivity();
      ok = ok && dom_ok;
      detail += name + (dom_ok ? " ok" : " FAIL") + " (identity " + num(identity) + ") ";
    }
    verdict(3, ok, detail);
  });

  // ---- 4: Bergman symmetry and reproducing property ------------------------
  criterion(4, [] {
    std::vector<std::pair<std::string, Domain>> doms;
    doms.emplace_back("disc", disc_domain(256));
    doms.emplace_back("annulus", annulus_domain(0.5, 256));
    bool ok = true;
    std::string detail;
    for (auto& [name, dom] : doms) {
      KernelSolver solver(dom, 2);
      BergmanKernel kb(solver, 2);
      std::vector<cplx> pts = qdzip_test::interior_samples(dom, 4, 5, 0.1);
      double herm = 0;
      for (cplx z : pts)
        for (cplx w : pts)
          herm = std::max(herm, dist(kb.eval(z, w), std::conj(kb.eval(w, z))));
      double rep = 0;
      for (int m = 0; m <= 3; ++m) {
        std::vector<cplx> poly(m + 1, cplx(0, 0));
        poly[m] = 1.0;
        for (cplx w : pts)
          rep = std::max(rep, reproducing_residual(kb, poly, w, 400, 2));
      }
      bool dom_ok = pts.size() == 5 && herm <= 1e-8 && rep <= 1e-3;
      ok = ok && dom_ok;
      detail += name + ": hermitian " + num(herm) + ", reproducing " + num(rep) + " ";
    }
    verdict(4, ok, detail);
  });

  // ---- 5-8 share the annulus solver and the tolerance sweep ----------------
  std::optional<Domain> ann_dom;
  std::optional<KernelSolver> ann_solver;
  std::vector<SweepEntry> sweep;  // tol 1e-4, 1e-6, 1e-8 in order

  criterion(5, [&] {
    ann_dom.emplace(annulus_domain(0.5, 256));
    ann_solver.emplace(*ann_dom, 2);
    for (double tol : {1e-4, 1e-6, 1e-8}) {
      FitOptions opts;
      opts.tol = tol;
      GustafssonMap map = build_map_scattered(*ann_solver, cplx(0.7, 0), opts);
      QuadratureData data = quadrature_data(map);
      std::vector<double> res = verify_quadrature(map, data, 10);
      double worst = 0;
      for (double r : res) worst = std::max(worst, r);
      sweep.push_back({std::move(map), std::move(data), worst});
    }
    bool monotone = sweep[0].worst_residual > sweep[1].worst_residual &&
                    sweep[1].worst_residual > sweep[2].worst_residual;
    bool ok = monotone && sweep[2].map.id_defect_c1() <= 1e-4 &&
              sweep[2].worst_residual <= 1e-6;
    verdict(5, ok, "identity defect " + num(sweep[2].map.id_defect_c1()) +
                       ", residuals " + num(sweep[0].worst_residual) + " > " +
                       num(sweep[1].worst_residual) + " > " +
                       num(sweep[2].worst_residual));
  });

  criterion(6, [&] {
    if (!ann_solver) throw ConstructionError("annulus solver unavailable");
    cplx w0(0.7, 0);
    double eps = 0.05;
    GustafssonMap map =
        build_map_clustered(*ann_solver, cplx(-0.7, 0), w0, eps, FitOptions{});
    QuadratureData data = quadrature_data(map);
    bool confined = !data.nodes.empty();
    bool simple = true;
    for (const QuadratureNode& nd : data.nodes) {
      if (std::abs(nd.node - w0) > eps) confined = false;
      if (nd.weights.size() != 1) simple = false;
    }
    bool ok = confined && simple && data.max_order2_coeff <= 1e-8;
    verdict(6, ok, std::to_string(data.nodes.size()) +
                       " nodes confined: " + (confined ? "yes" : "NO") +
                       ", all simple: " + (simple ? "yes" : "NO") +
                       ", order-2 leakage " + num(data.max_order2_coeff));
  });

  criterion(7, [&] {
    if (sweep.size() != 3) throw ConstructionError("tolerance sweep unavailable");
    const GustafssonMap& map = sweep[2].map;
    ZipArchive ar = pack(map, sweep[2].data);
    Domain image = archive_image_domain(ar);
    std::vector<cplx> pts =
        qdzip_test::interior_samples(*ann_dom, 11, 20, 0.08, map.refl_poles(), 0.05);
    double route = 0, direct = 0;
    for (cplx z : pts) {
      cplx w = map.eval(z);
      cplx via_h = unzip_h(ar, image, w);
      cplx via_refl = unzip_refl(ar, *ann_dom, z);
      route = std::max(route, dist(via_h, via_refl));
      direct = std::max(direct, dist(via_refl, map.refl_eval(z)));
    }
    double q0 = 0;
    Domain disc = disc_domain(256);
    for (cplx z : {cplx(0, 0), cplx(0.4, 0.2), cplx(-0.3, -0.6)})
      q0 = std::max(q0, std::abs(q_transform(disc, z)));
    std::vector<std::pair<cplx, cplx>> pairs;
    for (std::size_t i = 0; i + 1 < pts.size() && pairs.size() < 6; i += 2)
      pairs.emplace_back(pts[i], pts[i + 1]);
    double pull = bergman_pullback_residual(ar, *ann_dom, pairs, 2);
    std::string text = archive_to_json(ar);
    bool bitexact = archive_to_json(archive_from_json(text)) == text;
    bool ok = pts.size() == 20 && route <= 1e-6 && direct <= 1e-6 && q0 <= 1e-10 &&
              pull <= 1e-5 && bitexact;
    verdict(7, ok, "routes " + num(route) + ", direct " + num(direct) +
                       ", centered-disc transform " + num(q0) + ", pullback " +
                       num(pull) + ", round trip " + (bitexact ? "exact" : "BROKEN"));
  });

  criterion(8, [&] {
    if (sweep.size() != 3) throw ConstructionError("tolerance sweep unavailable");
    // quadratized annulus image: an algebraic boundary at the fit accuracy
    Domain image = sweep[2].map.image_domain();
    std::vector<std::pair<cplx, cplx>> img_uv;
    for (int k = 0; k < image.connectivity(); ++k)
      for (int i = 0; i < image.grid(); i += 2)
        img_uv.emplace_back(image.points(k)[i], std::conj(image.points(k)[i]));
    AlgebraicRelation img_rel = fit_relation_search(img_uv, 6);
    bool img_ok = img_rel.decisive && img_rel.residual <= 1e-6;

    // circle: exact relation u v - 1 at degree 2
    Domain disc = disc_domain(256);
    std::vector<std::pair<cplx, cplx>> circ_uv;
    for (int i = 0; i < disc.grid(); ++i)
      circ_uv.emplace_back(disc.points(0)[i], std::conj(disc.points(0)[i]));
    AlgebraicRelation circ = fit_algebraic_relation(circ_uv, 2);
    bool circ_ok = circ.residual <= 1e-12 &&
                   dist(circ.coeffs[4] / circ.coeffs[0], cplx(-1, 0)) <= 1e-10;

    // raw annulus: degree 2 must fail, degree 4 must factor the product
    std::vector<std::pair<cplx, cplx>> ann_uv;
    for (int k = 0; k < ann_dom->connectivity(); ++k)
      for (int i = 0; i < ann_dom->grid(); i += 2)
        ann_uv.emplace_back(ann_dom->points(k)[i], std::conj(ann_dom->points(k)[i]));
    AlgebraicRelation low = fit_algebraic_relation(ann_uv, 2);
    AlgebraicRelation high = fit_relation_search(ann_uv, 6);
    bool ann_ok = low.residual >= 1e-2 && high.decisive && high.degree == 4 &&
                  dist(high.coeffs[12] / high.coeffs[0], cplx(4, 0)) <= 1e-6 &&
                  dist(high.coeffs[6] / high.coeffs[0], cplx(-5, 0)) <= 1e-6;

    bool ok = img_ok && circ_ok && ann_ok;
    verdict(8, ok, "image degree " + std::to_string(img_rel.degree) + " residual " +
                       num(img_rel.residual) + ", circle " + num(circ.residual) +
                       ", raw annulus low " + num(low.residual) + " high degree " +
                       std::to_string(high.degree));
  });

  // ---- 9: bit-exact determinism of the command-line artifacts --------------
  criterion(9, [] {
    fs::create_directories("acceptance_work");
    save_domain(annulus_domain(0.5, 256), "acceptance_work/annulus.json");
    save_domain(disc_domain(256), "acceptance_work/disc.json");
    for (const char* tag : {"q1", "q2"})
      if (run_cli("quadratize --domain acceptance_work/annulus.json --tol 1e-6 "
                  "--seed 3 --out acceptance_work/" + std::string(tag)) != 0)
        throw ConstructionError("quadratize run failed");
    for (const char* tag : {"a1", "a2"})
      if (run_cli("algebraic --domain acceptance_work/disc.json --seed 3 "
                  "--out acceptance_work/" + std::string(tag)) != 0)
        throw ConstructionError("algebraic run failed");
    auto dirs_equal = [](const std::string& lhs, const std::string& rhs) {
      int files = 0;
      for (const auto& entry : fs::directory_iterator(lhs)) {
        ++files;
        fs::path other = fs::path(rhs) / entry.path().filename();
        if (!fs::exists(other)) return false;
        if (read_file(entry.path().string()) != read_file(other.string())) return false;
      }
      return files > 0;
    };
    bool ok = dirs_equal("acceptance_work/q1", "acceptance_work/q2") &&
              dirs_equal("acceptance_work/a1", "acceptance_work/a2");
    verdict(9, ok, std::string("repeated runs byte-identical: ") + (ok ? "yes" : "NO"));
  });

  std::printf("%d of 9 criteria passed\n", 9 - g_failures);
  return g_failures;
}
