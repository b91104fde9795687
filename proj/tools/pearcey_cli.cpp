// Command-line front end: gap-probability batches, asymptotic fitting,
// verification suites and pointwise kernel evaluation.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pearcey/asymptotics.hpp"
#include "pearcey/nystrom.hpp"
#include "pearcey/parametrix.hpp"

using namespace pearcey;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct GridSpec {
    std::vector<double> values;
};

// grid syntax: min:max:count[log|lin]  (default lin)
bool parse_grid(const std::string& text, GridSpec& out) {
    double lo, hi;
    int count;
    char mode[8] = "lin";
    int n = std::sscanf(text.c_str(), "%lf:%lf:%d%7s", &lo, &hi, &count, mode);
    if (n < 3 || count < 1 || !(hi > lo) || !(lo > 0.0)) return false;
    std::string m = (n == 3) ? "lin" : mode;
    if (m != "lin" && m != "log") return false;
    out.values.clear();
    for (int i = 0; i < count; ++i) {
        double t = count == 1 ? 0.0 : double(i) / (count - 1);
        out.values.push_back(m == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
    return true;
}

struct Row {
    std::vector<std::pair<std::string, std::string>> cells;
};

void emit_rows(const std::vector<std::string>& headers, const std::vector<Row>& rows,
               const std::string& out_path, const std::string& format) {
    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t i = 0; i < headers.size(); ++i)
            os << headers[i] << (i + 1 < headers.size() ? "," : "\n");
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.cells.size(); ++i)
                os << r.cells[i].second << (i + 1 < r.cells.size() ? "," : "\n");
    } else {
        os << "[\n";
        for (std::size_t k = 0; k < rows.size(); ++k) {
            os << "  {";
            for (std::size_t i = 0; i < rows[k].cells.size(); ++i) {
                os << "\"" << rows[k].cells[i].first << "\": " << rows[k].cells[i].second;
                if (i + 1 < rows[k].cells.size()) os << ", ";
            }
            os << "}" << (k + 1 < rows.size() ? "," : "") << "\n";
        }
        os << "]\n";
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open output file " + out_path);
        f << os.str();
    }
}

struct CheckResult {
    std::string name;
    double residual;
    double tol;
    bool pass() const { return residual <= tol; }
};

void report(std::vector<CheckResult>& all, const std::string& name, double resid, double tol) {
    all.push_back({name, resid, tol});
    std::printf("%-52s %-4s residual=%.3e tol=%.1e\n", name.c_str(),
                resid <= tol ? "PASS" : "FAIL", resid, tol);
}

void suite_w(std::vector<CheckResult>& all) {
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        double r = std::pow(10.0, -3.0 + 6.0 * (i % 500) / 499.0);
        double th = 0.05 + 3.0 * ((i * 7) % 97) / 97.0;
        cplx z = r * std::exp(iu * th * (i % 2 ? 1.0 : -1.0));
        WTriple w = w_triple(z);
        double tol = std::max(1.0, std::abs(z));
        worst = std::max(worst, std::abs(w.w1 + w.w2 + w.w3 - 1.5) / tol);
        worst = std::max(worst, std::abs(w.w1 * w.w2 + w.w1 * w.w3 + w.w2 * w.w3) / tol);
        worst = std::max(worst, std::abs(w.w1 * w.w2 * w.w3 + z / 2.0) / tol);
    }
    report(all, "w.vieta_2000pts", worst, 1e-11);

    WTriple up = w_boundary(-1.0, +1), dn = w_boundary(-1.0, -1);
    report(all, "w.glue_neg_axis", std::abs(up.w2 - dn.w3), 1e-8);
    WTriple up4 = w_boundary(4.0, +1), dn4 = w_boundary(4.0, -1);
    report(all, "w.glue_pos_axis", std::abs(up4.w2 - dn4.w1), 1e-8);

    cplx z(1.3, 0.8);
    WTriple a = w_triple(z), b = w_triple(std::conj(z));
    report(all, "w.schwarz", std::abs(b.w2 - std::conj(a.w2)), 1e-11);

    double ord = series_order(SeriesLocation::Infinity, SeriesObject::W, 2, true, 1e3, 1e4);
    report(all, "w.series_order_infty", std::abs(ord - 5.0 / 3.0), 0.1);
}

void suite_lambda(std::vector<CheckResult>& all) {
    LambdaParams p{8.0, 0.5};
    ExpansionCoeffs c = expansion_coeffs(p);
    LambdaTriple l0 = lambda_triple(cplx(1e-12, 1e-14), p);
    report(all, "lambda.limit_at_0", std::abs(l0.l2 - c.c0), 1e-5);
    LambdaTriple l1 = lambda_triple(cplx(1.0, 1e-12), p);
    report(all, "lambda.limit_at_1", std::abs(l1.l1 - c.ct0), 1e-5);
    report(all, "lambda.theta_match", theta_match(cplx(1e4, 1.0), p, 3),
           10.0 * std::pow(1e4, -1.0 / 3.0));
    auto sb = sign_bounds_scan(p, SignContour::EdgeOne, 0.1);
    report(all, "lambda.sign_margin_edge1", sb.min_margin > 0.0 ? 0.0 : 1.0, 0.5);
    auto sb2 = sign_bounds_scan(p, SignContour::EdgeZero, 0.1);
    report(all, "lambda.sign_margin_edge0", sb2.min_margin > 0.0 ? 0.0 : 1.0, 0.5);
    LambdaParams p0{5.0, 0.0};
    report(all, "lambda.star_collapse_rho0",
           std::abs(lambda_triple(cplx(0.4, 0.3), p0).l2 - lambda_star(cplx(0.4, 0.3), 2)),
           1e-13);
}

void suite_kernel(std::vector<CheckResult>& all) {
    KernelParams k2{2.0, 0.5};
    double x = 0.7, y = 1.3;
    double a = kernel_psi(x, y, k2);
    double b = kernel_double(x, y, k2);
    double c = kernel_pq(x, y, k2, QConvention::OdeConsistent);
    report(all, "kernel.triangle_psi_double(a2)", std::abs(a - b) / std::abs(a), 1e-8);
    report(all, "kernel.triangle_psi_pq(a2)", std::abs(a - c) / std::abs(a), 1e-7);
    KernelParams k3{3.0, 0.5};
    double a3 = kernel_psi(x, y, k3);
    double c3 = kernel_pq(x, y, k3, QConvention::OdeConsistent);
    report(all, "kernel.triangle_psi_pq(a3)", std::abs(a3 - c3) / std::abs(a3), 1e-7);
    report(all, "kernel.q_ode_residual", q_ode_residual(y, k3, QConvention::OdeConsistent), 1e-8);
    report(all, "kernel.p_ode_residual", p_ode_residual(x, k3), 1e-9);

    double kd = kernel_diag(1.0, k2);
    double sec = 0.5 * (kernel_psi(1.0 + 5e-5, 1.0 - 5e-5, k2) +
                        kernel_psi(1.0 - 5e-5, 1.0 + 5e-5, k2));
    report(all, "kernel.diag_secant", std::abs(kd - sec), 1e-6);

    FHVectors v = fh_vectors(1.0, k2);
    cplx dot(0.0);
    for (int i = 0; i < 3; ++i) dot += v.f[i] * v.h[i];
    report(all, "kernel.fh_orthogonal", std::abs(dot), 1e-9);

    double h = 1e-4;
    double dk = (kernel_diag(1.0, KernelParams{2.0, 0.5 + h}) -
                 kernel_diag(1.0, KernelParams{2.0, 0.5 - h})) /
                (2.0 * h);
    report(all, "kernel.drho_diag_f3h1", std::abs(dk - std::real(v.f[2] * v.h[0])), 1e-6);
}

void suite_bessel(std::vector<CheckResult>& all) {
    double worst = 0.0;
    for (double nu : {0.0, 0.7, 2.0, 3.3}) {
        for (cplx z : {cplx(0.9, 0.0), cplx(2.0, 1.0), cplx(5.0, -2.0), cplx(4.0, 4.0),
                       cplx(0.3, 0.1)}) {
            BesselDerivs d = bessel_derivs(nu, z);
            worst = std::max(worst,
                             std::abs(bessel_i(nu, z) * d.kp - d.ip * bessel_k(nu, z) + 1.0 / z));
        }
    }
    report(all, "bessel.wronskian_grid", worst, 1e-9);

    cplx zc = 28.0 * std::exp(iu * 0.4);
    report(all, "bessel.crossover",
           std::abs(detail::bessel_i_series(1.3, zc) - detail::bessel_i_asym(1.3, zc)) /
               std::abs(detail::bessel_i_series(1.3, zc)),
           1e-8);

    double o = std::sqrt(2.0 / pi) * std::sinh(1.0);
    report(all, "bessel.half_integer_closed_form", std::abs(bessel_i(0.5, 1.0) - o), 1e-11);
    auto path = ContourPath::line(0.0, 12.0);
    cplx oracle =
        integrate_contour([](cplx t) { return std::exp(-5.0 * std::cosh(std::real(t))); }, path,
                          1e-14)
            .value;
    report(all, "bessel.k0_integral_oracle", std::abs(bessel_k(0.0, 5.0) - oracle), 1e-9);
}

void suite_parametrix(std::vector<CheckResult>& all) {
    double alpha = 2.5;
    auto bdry = [&](double x, int side) {
        Mat3 acc;
        std::vector<std::pair<double, cplx>> samp[9];
        for (double d : {1e-5, 5e-6, 2.5e-6}) {
            Mat3 m = n_alpha_eval(cplx(x, side > 0 ? d : -d), alpha);
            for (int e = 0; e < 9; ++e) samp[e].push_back({d, m.a[e]});
        }
        for (int e = 0; e < 9; ++e) acc.a[e] = extrapolate_to_zero(samp[e], 1.0).value;
        return acc;
    };
    cplx ea = std::exp(-alpha * pi * iu);
    Mat3 J1m;
    J1m(0, 0) = 1.0;
    J1m(1, 2) = -ea;
    J1m(2, 1) = ea;
    report(all, "parametrix.N_jump_neg_axis", (bdry(-2.0, 1) - bdry(-2.0, -1) * J1m).norm(),
           1e-8);
    Mat3 J2;
    J2(0, 1) = 1.0;
    J2(1, 0) = -1.0;
    J2(2, 2) = 1.0;
    report(all, "parametrix.N_jump_pos_axis", (bdry(4.0, 1) - bdry(4.0, -1) * J2).norm(), 1e-8);

    Mat2 pp = bessel_parametrix(cplx(-2.0, 1e-9), 1.3);
    Mat2 pm = bessel_parametrix(cplx(-2.0, -1e-9), 1.3);
    Mat2 Jb;
    Jb(0, 1) = -1.0;
    Jb(1, 0) = 1.0;
    Mat2 rhs = pm * Jb;
    double jr = 0.0;
    for (int e = 0; e < 4; ++e) jr = std::max(jr, std::abs(pp.a[e] - rhs.a[e]));
    report(all, "parametrix.bessel_jump_gamma2", jr, 1e-9);
    report(all, "parametrix.bessel_unimodular",
           std::abs(bessel_parametrix(cplx(2.0, 1.0), 1.3).det() + 1.0), 1e-9);

    KernelParams kp{2.0, 0.5};
    LocalParametrix lp{kp, 100.0};
    Mat3 epl = lp.Ecal(cplx(-0.1, 1e-8)), emi = lp.Ecal(cplx(-0.1, -1e-8));
    report(all, "parametrix.E_analytic", (epl - emi).norm() / epl.norm(), 1e-7);
    Mat3 tpl = lp.Etilde(cplx(1.1, 1e-8)), tmi = lp.Etilde(cplx(1.1, -1e-8));
    report(all, "parametrix.Etilde_analytic", (tpl - tmi).norm() / tpl.norm(), 1e-7);

    Mat3 rc = res0_j1_closed(kp, 8.0), rq = res0_j1_quadrature(kp, 8.0);
    report(all, "parametrix.res0_closed_vs_quadrature", (rc - rq).norm() / rc.norm(), 1e-8);

    Mat3 e1c = etilde1_closed(kp, 100.0);
    Mat3 e1n = lp.Etilde(cplx(1.0 + 1e-7, 1e-11));
    report(all, "parametrix.Etilde1_closed_form", (e1c - e1n).norm() / e1c.norm(), 1e-5);
}

void suite_identities(std::vector<CheckResult>& all, unsigned threads) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double a = -0.9 + 5.0 * i / 19.0, r = -2.0 + 4.0 * ((i * 13) % 19) / 18.0;
        double pi3 = r * (r * r + 9.0 * a - 18.0) / 27.0;
        worst = std::max(worst, std::abs(-pi3 - 2.0 * r / 3.0 + r * (r * r + 9.0 * a) / 27.0));
    }
    report(all, "identities.pi3_scalar", worst, 1e-14);

    KernelParams kp{2.0, 0.5};
    NystromSystem sys = build_nystrom(5.0, 128, kp, threads);
    ResolventMoment y1 = resolvent_y1(sys);
    DerivResult dr = dF(5.0, kp, DVar::Rho, 1e-3, 1e-10, threads);
    report(all, "identities.dFdrho_eq_negY1_31", std::abs(dr.value + y1.y1_31), 1e-5);

    DerivResult ds = dF(20.0, kp, DVar::S, 1e-3, 1e-10, threads);
    report(all, "identities.dFds_vs_rh_expansion", std::abs(ds.value - dfds_from_rh(20.0, kp)),
           0.05);

    double x = 1.4, h = 1e-5;
    auto ld = [&](double xx) { return std::log(psi_tilde(xx, kp).M.det()); };
    cplx d = (ld(x + h) - ld(x - h)) / (2.0 * h);
    report(all, "identities.abel_logdet", std::abs(d + kp.alpha / x), 1e-7);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hard edge Pearcey determinant laboratory"};
    app.set_config("--config", "", "plain key=value configuration file");

    double alpha = 2.0, rho = 0.0, tol = 1e-8, gamma = 1.0;
    int nodes = 512;
    unsigned threads = 0;
    std::string out_path, format = "csv";
    if (const char* env = std::getenv("PEARCEY_THREADS")) threads = std::atoi(env);

    app.add_option("--alpha", alpha, "kernel parameter alpha > -1");
    app.add_option("--rho", rho, "kernel parameter rho");
    app.add_option("--tol", tol, "target tolerance for adaptive refinement");
    app.add_option("--nodes", nodes, "maximum Nystrom node count");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* cmd_gap = app.add_subcommand("gap", "gap probability F(s) = ln det(I - K_s)");
    cmd_gap->fallthrough();
    double gap_s = 0.0;
    std::string gap_grid;
    cmd_gap->add_option("--s", gap_s, "single gap radius");
    cmd_gap->add_option("--s-grid", gap_grid, "grid min:max:count[log|lin]");
    cmd_gap->add_option("--gamma", gamma, "thinning factor in ln det(I - gamma K_s)");

    auto* cmd_fit = app.add_subcommand("fit", "fit the large-gap expansion constant");
    cmd_fit->fallthrough();
    std::string fit_grid = "8:25:6log";
    bool fit_free_log = false;
    cmd_fit->add_option("--s-grid", fit_grid, "grid min:max:count[log|lin]");
    cmd_fit->add_flag("--free-log", fit_free_log, "also fit the log coefficient (diagnostic)");

    auto* cmd_verify = app.add_subcommand("verify", "run named invariant suites");
    cmd_verify->fallthrough();
    std::string suite = "all";
    cmd_verify->add_option("--suite", suite, "w|lambda|kernel|bessel|parametrix|identities|all")
        ->check(CLI::IsMember(
            {"w", "lambda", "kernel", "bessel", "parametrix", "identities", "all"}));

    auto* cmd_kernel = app.add_subcommand("kernel", "evaluate the kernel at a point");
    cmd_kernel->fallthrough();
    double kx = 1.0, ky = 2.0, kdiag = 0.0;
    cmd_kernel->add_option("--x", kx, "first argument");
    cmd_kernel->add_option("--y", ky, "second argument");
    cmd_kernel->add_option("--diag", kdiag, "evaluate on the diagonal at this x");

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    KernelParams kp{alpha, rho};
    try {
        kp.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*cmd_gap) {
            GridSpec grid;
            if (!gap_grid.empty()) {
                if (!parse_grid(gap_grid, grid)) {
                    std::cerr << "config error: bad --s-grid\n";
                    return 1;
                }
            } else if (gap_s > 0.0) {
                grid.values = {gap_s};
            } else {
                std::cerr << "config error: gap needs --s or --s-grid\n";
                return 1;
            }
            for (double s : grid.values)
                if (s > 30.0) std::cerr << "warning: s=" << s << " beyond documented range 30\n";
            std::vector<GapResult> results(grid.values.size());
            std::exception_ptr err;
            std::mutex err_mtx;
            parallel_for(
                grid.values.size(),
                [&](std::size_t i) {
                    try {
                        results[i] = gap_log_prob(grid.values[i], kp, tol, gamma, 1, nodes);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mtx);
                        if (!err) err = std::current_exception();
                    }
                },
                threads);
            if (err) std::rethrow_exception(err);
            std::vector<Row> rows;
            for (std::size_t i = 0; i < grid.values.size(); ++i) {
                Row r;
                r.cells = {{"s", fmt17(grid.values[i])},
                           {"F", fmt17(results[i].F)},
                           {"det", fmt17(std::exp(results[i].F))},
                           {"est_error", fmt17(results[i].est_error)},
                           {"m_used", std::to_string(results[i].m_used)}};
                rows.push_back(r);
            }
            emit_rows({"s", "F", "det", "est_error", "m_used"}, rows, out_path, format);
            return 0;
        }

        if (*cmd_fit) {
            GridSpec grid;
            if (!parse_grid(fit_grid, grid)) {
                std::cerr << "config error: bad --s-grid\n";
                return 1;
            }
            std::vector<double> fs(grid.values.size());
            std::exception_ptr err;
            std::mutex err_mtx;
            parallel_for(
                grid.values.size(),
                [&](std::size_t i) {
                    try {
                        fs[i] = gap_log_prob(grid.values[i], kp, tol, 1.0, 1, nodes).F;
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mtx);
                        if (!err) err = std::current_exception();
                    }
                },
                threads);
            if (err) std::rethrow_exception(err);
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < grid.values.size(); ++i)
                pts.push_back({grid.values[i], fs[i]});
            FitResult fr = fit_constant(pts, kp, fit_free_log);
            double expo = fcet_exponent(pts, kp, fr.c_hat, fr.a_hat, true);
            std::printf("# fit report (alpha=%g, rho=%g)\n", alpha, rho);
            std::printf("C_hat        %s\n", fmt17(fr.c_hat).c_str());
            std::printf("C_err        %s\n", fmt17(fr.c_err).c_str());
            std::printf("a_hat        %s\n", fmt17(fr.a_hat).c_str());
            std::printf("log_coef     %s%s\n", fmt17(fr.log_hat).c_str(),
                        fr.log_freed ? "  (fitted)" : "  (fixed)");
            std::printf("fcet_slope   %s\n", fmt17(expo).c_str());
            std::printf("rms_residual %s\n", fmt17(fr.rms_residual).c_str());
            std::printf("# s, F, residual\n");
            for (std::size_t i = 0; i < pts.size(); ++i)
                std::printf("%s,%s,%s\n", fmt17(pts[i].first).c_str(),
                            fmt17(pts[i].second).c_str(), fmt17(fr.residuals[i]).c_str());
            return 0;
        }

        if (*cmd_verify) {
            std::vector<CheckResult> all;
            if (suite == "w" || suite == "all") suite_w(all);
            if (suite == "lambda" || suite == "all") suite_lambda(all);
            if (suite == "kernel" || suite == "all") suite_kernel(all);
            if (suite == "bessel" || suite == "all") suite_bessel(all);
            if (suite == "parametrix" || suite == "all") suite_parametrix(all);
            if (suite == "identities" || suite == "all") suite_identities(all, threads);
            int failed = 0;
            for (const auto& c : all)
                if (!c.pass()) ++failed;
            std::printf("# %zu checks, %d failed\n", all.size(), failed);
            return failed == 0 ? 0 : 2;
        }

        if (*cmd_kernel) {
            if (kdiag > 0.0) {
                double v = kernel_diag(kdiag, kp);
                std::printf("K(%g,%g) diag = %s\n", kdiag, kdiag, fmt17(v).c_str());
                return 0;
            }
            double a = kernel_psi(kx, ky, kp);
            std::printf("psi            %s\n", fmt17(a).c_str());
            if (kp.alpha_is_integer() && kp.alpha >= 2.0) {
                double b = kernel_double(kx, ky, kp);
                double c = kernel_pq(kx, ky, kp, QConvention::OdeConsistent);
                std::printf("double         %s\n", fmt17(b).c_str());
                std::printf("pq             %s\n", fmt17(c).c_str());
                std::printf("dev_psi_double %s\n", fmt17(std::abs(a - b)).c_str());
                std::printf("dev_psi_pq     %s\n", fmt17(std::abs(a - c)).c_str());
            } else {
                std::printf("double         n/a (needs integer alpha >= 2)\n");
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
