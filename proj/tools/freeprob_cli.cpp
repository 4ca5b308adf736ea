// Batch front end: parses measure / polynomial / Q-matrix inputs, dispatches
// to the library modules, and writes machine-readable reports.
//
// Exit codes: 0 = ran to completion (a failed inequality is data, not an
// error), 1 = bad configuration or unreadable input, 2 = computation failure
// (the report carries the module error).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freeprob/entropy.hpp"
#include "freeprob/fockq.hpp"
#include "freeprob/freeconv.hpp"
#include "freeprob/ineq.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/ncpoly.hpp"
#include "freeprob/report_json.hpp"
#include "freeprob/stein.hpp"
#include "freeprob/transforms.hpp"

namespace {

namespace fp = freeprob;
using fp::measure::Measure1D;
using fp::report::Json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json_file(const std::string& path) {
    try {
        return Json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
}

double num_field(const Json& spec, const char* key, double fallback,
                 bool required = false) {
    if (!spec.contains(key)) {
        if (required)
            throw ConfigError(std::string("measure spec missing \"") + key +
                              "\"");
        return fallback;
    }
    if (!spec[key].is_number())
        throw ConfigError(std::string("measure field \"") + key +
                          "\" must be a number");
    return spec[key].get<double>();
}

Measure1D measure_from_json(const Json& spec, int grid_n) {
    if (!spec.is_object()) throw ConfigError("measure spec must be an object");
    if (spec.contains("family")) {
        const std::string fam = spec["family"].get<std::string>();
        if (fam == "semicircle")
            return fp::measure::semicircle(num_field(spec, "mean", 0.0),
                                           num_field(spec, "variance", 1.0),
                                           grid_n);
        if (fam == "uniform")
            return fp::measure::uniform_sym(
                num_field(spec, "half_width", 0.0, true), grid_n);
        if (fam == "arcsine")
            return fp::measure::arcsine(
                num_field(spec, "half_width", 0.0, true), grid_n);
        if (fam == "marchenko_pastur")
            return fp::measure::marchenko_pastur_centered(
                num_field(spec, "lambda", 0.0, true), grid_n);
        if (fam == "bernoulli") return fp::measure::symmetric_bernoulli();
        if (fam == "point")
            return fp::measure::point_mass(num_field(spec, "x", 0.0));
        throw ConfigError("unknown measure family \"" + fam + "\"");
    }
    if (spec.contains("grid")) {
        std::vector<double> grid, dens;
        for (const auto& v : spec["grid"]) grid.push_back(v.get<double>());
        if (!spec.contains("density"))
            throw ConfigError("grid measure spec missing \"density\"");
        for (const auto& v : spec["density"]) dens.push_back(v.get<double>());
        std::vector<fp::measure::Atom> atoms;
        if (spec.contains("atoms"))
            for (const auto& a : spec["atoms"]) {
                if (!a.is_array() || a.size() != 2)
                    throw ConfigError("atoms must be [position, mass] pairs");
                atoms.push_back({a[0].get<double>(), a[1].get<double>()});
            }
        try {
            return fp::measure::from_grid(grid, dens, atoms);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bad grid measure: ") + e.what());
        }
    }
    throw ConfigError("measure spec needs either \"family\" or \"grid\"");
}

Measure1D load_measure(const std::string& path, int grid_n, Json& echo) {
    echo = parse_json_file(path);
    return measure_from_json(echo, grid_n);
}

Eigen::MatrixXd load_qmatrix(const std::string& path) {
    std::istringstream in(slurp(path));
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (!in.eof()) throw ConfigError("non-numeric data in Q matrix " + path);
    const auto m = vals.size();
    const int n = int(std::lround(std::sqrt(double(m))));
    if (m == 0 || std::size_t(n) * std::size_t(n) != m)
        throw ConfigError("Q matrix " + path +
                          " must hold a square number of entries");
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = vals[std::size_t(i) * n + j];
    return Q;
}

fp::ncpoly::NCPoly load_poly(const std::string& path) {
    try {
        return fp::ncpoly::poly_from_text(slurp(path));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bad polynomial file " + path + ": " + e.what());
    }
}

Json ineq_to_json(const fp::ineq::IneqReport& r) {
    Json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["holds"] = r.holds;
    j["tolerance"] = r.tolerance;
    Json in = Json::object();
    for (const auto& [k, v] : r.inputs) in[k] = v;
    j["inputs"] = in;
    j["flags"] = r.flags;
    return j;
}

Json ineq_rows(const std::vector<fp::ineq::IneqReport>& rows) {
    Json a = Json::array();
    for (const auto& r : rows) a.push_back(ineq_to_json(r));
    return a;
}

std::string word_name(const std::vector<int>& w) {
    if (w.empty()) return "1";
    std::string s;
    for (int l : w) s += "x" + std::to_string(l);
    return s;
}

// all words over {0..n-1} of length 1..max_len
std::vector<std::vector<int>> word_battery(int n, int max_len) {
    std::vector<std::vector<int>> out;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> w(len, 0);
        while (true) {
            out.push_back(w);
            int k = len - 1;
            while (k >= 0 && ++w[k] == n) w[k--] = 0;
            if (k < 0) break;
        }
    }
    return out;
}

// Options shared across subcommands; each subcommand binds the members it
// uses, so unset ones keep their defaults and are not echoed.
struct Opts {
    std::string measure_path, measure2_path, poly_path, q_path;
    std::string output, format = "json";
    int grid = fp::measure::kDefaultGridN;
    int degree = 8;
    int depth = 6;
    int n_gens = 0;
    int points = 201;
    int dim = 4;
    int trials = 50;
    double rho = 1.0;
    double q = 0.0;
    double im_height = 1.0;
    double re_min = 0.0, re_max = 0.0;
    bool has_re_min = false, has_re_max = false, has_q = false;
    std::vector<double> ts{0.1, 0.25, 0.5, 1.0, 2.0};
    std::vector<double> weights;
    std::vector<int> Ns{2, 4, 8, 16};
    std::uint64_t seed = 0;
};

int emit(const std::string& output, const std::string& format, Json& rep,
         const std::function<void(Json&)>& compute) {
    try {
        compute(rep);
    } catch (const std::invalid_argument&) {
        throw;  // argument rejection by a module = configuration error
    } catch (const std::exception& e) {
        rep["error"] = e.what();
        fp::report::write_report(output, rep, format);
        return 2;
    }
    fp::report::write_report(output, rep, format);
    return 0;
}

Json base_report(const char* sub, const Opts& o, Json cfg_extra) {
    Json cfg;
    cfg["subcommand"] = sub;
    for (const auto& [k, v] : cfg_extra.items()) cfg[k] = v;
    cfg["output"] = o.output.empty() ? "-" : o.output;
    cfg["format"] = o.format;
    Json rep;
    rep["tool"] = fp::report::tool_version();
    rep["config"] = cfg;
    return rep;
}

void require_positive(double v, const char* what) {
    if (!(v > 0)) throw ConfigError(std::string(what) + " must be positive");
}

void require_ts(const std::vector<double>& ts) {
    if (ts.empty()) throw ConfigError("need at least one --t value");
    for (double t : ts) require_positive(t, "--t");
}

fp::freeconv::ConvOptions conv_opts(const Opts& o) {
    fp::freeconv::ConvOptions c;
    c.out_grid = o.grid;
    return c;
}

int do_entropy(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    Json rep = base_report("entropy", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        const auto er = fp::entropy::entropy_report(mu, o.rho);
        r["free_entropy"] = er.chi;
        r["log_energy"] = fp::entropy::log_energy(mu);
        r["relative_entropy"] = er.chi_rel;
        r["entropy_gap"] = fp::entropy::gibbs_entropy_gap(mu, o.rho);
        r["variance"] = er.variance;
    });
}

int do_fisher(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    Json rep = base_report("fisher", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["fisher"] = fp::entropy::fisher(mu);
        r["relative_fisher"] = fp::entropy::relative_fisher(mu, o.rho);
        r["variance"] = mu.variance();
    });
}

int do_stein(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    if (o.degree < 1) throw ConfigError("--degree must be >= 1");
    Json rep = base_report("stein", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"degree", o.degree},
                            {"rho", o.rho},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        const auto k = fp::stein::estimate_kernel(mu, o.degree, 1e-10, o.rho);
        r["degree"] = k.degree;
        r["discrepancy_lb"] = k.discrepancy_lb;
        r["gram_cond"] = k.gram_cond;
        r["ridge_used"] = k.ridge_used;
        r["residuals"] = k.residuals;
        Json rows = Json::array();
        const int m = k.degree + 1;
        for (int i = 0; i < m; ++i) {
            Json row = Json::array();
            for (int j = 0; j < m; ++j)
                row.push_back(k.coeffs[std::size_t(i) * m + j]);
            rows.push_back(row);
        }
        r["coeffs"] = rows;
    });
}

int do_transform(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.im_height, "--im");
    if (o.points < 2) throw ConfigError("--points must be >= 2");
    const double lo = o.has_re_min ? o.re_min : mu.lo - 1.0;
    const double hi = o.has_re_max ? o.re_max : mu.hi + 1.0;
    if (!(lo < hi)) throw ConfigError("--re-min must lie below --re-max");
    Json rep = base_report("transform", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"im", o.im_height},
                            {"re_min", lo},
                            {"re_max", hi},
                            {"points", o.points},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        Json rows = Json::array();
        for (int i = 0; i < o.points; ++i) {
            const double x = lo + (hi - lo) * i / double(o.points - 1);
            const auto g =
                fp::transforms::cauchy(mu, {x, o.im_height});
            Json row;
            row["re"] = x;
            row["im"] = o.im_height;
            row["G_re"] = g.real();
            row["G_im"] = g.imag();
            rows.push_back(row);
        }
        r["rows"] = rows;
    });
}

int do_flow(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    require_ts(o.ts);
    Json rep = base_report("flow", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"t", o.ts},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        Json rows = Json::array();
        for (double t : o.ts) {
            const auto pt = fp::freeconv::ou_flow(mu, t, o.rho, conv_opts(o));
            Json row;
            row["t"] = pt.t;
            row["free_entropy"] = pt.chi_star;
            row["relative_fisher"] = pt.fisher_rel;
            row["variance"] = pt.law.variance();
            rows.push_back(row);
        }
        r["rows"] = rows;
    });
}

int do_lsi(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    Json rep = base_report("lsi", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["check"] = ineq_to_json(fp::ineq::lsi_check(mu, o.rho));
    });
}

int do_hsi(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    if (o.degree < 1) throw ConfigError("--degree must be >= 1");
    Json rep = base_report("hsi", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"degree", o.degree},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["check"] = ineq_to_json(fp::ineq::hsi_check(mu, o.rho, o.degree));
    });
}

int do_flow_checks(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    require_ts(o.ts);
    if (o.degree < 1) throw ConfigError("--degree must be >= 1");
    Json rep = base_report("flow-checks", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"t", o.ts},
                            {"degree", o.degree},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        const auto rows =
            fp::ineq::flow_checks(mu, o.rho, o.ts, o.degree, conv_opts(o));
        r["rows"] = ineq_rows(rows);
        bool all = true;
        for (const auto& row : rows) all = all && row.holds;
        r["all_hold"] = all;
    });
}

int do_deficit(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    Json rep = base_report("deficit", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["check"] = ineq_to_json(fp::ineq::deficit_check(mu, o.rho));
    });
}

int do_stam(const Opts& o) {
    Json spec, spec2;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    const Measure1D nu = load_measure(o.measure2_path, o.grid, spec2);
    Json rep = base_report("stam", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"measure2", o.measure2_path},
                            {"measure2_spec", spec2},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["check"] = ineq_to_json(fp::ineq::stam_check(mu, nu, conv_opts(o)));
    });
}

int do_clt(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    if (o.weights.empty()) {
        if (o.Ns.empty()) throw ConfigError("need --N values or --weights");
        for (int n : o.Ns)
            if (n < 2) throw ConfigError("--N entries must be >= 2");
    }
    Json rep = base_report("clt", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"N", o.Ns},
                            {"weights", o.weights},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        const auto report =
            fp::ineq::clt_harness(mu, o.Ns, o.weights, conv_opts(o));
        Json rows = Json::array();
        for (const auto& row : report.rows) {
            Json j;
            j["N"] = row.N;
            j["weights"] = row.weights_tag;
            j["sigma"] = row.sigma;
            j["entropy_gap"] = row.entropy_gap;
            j["relative_fisher"] = row.fisher_rel;
            j["bound"] = row.bound;
            j["ratio"] = row.ratio;
            rows.push_back(j);
        }
        r["rows"] = rows;
    });
}

int do_fock(const Opts& o) {
    const bool mixed = !o.q_path.empty();
    if (mixed && o.has_q)
        throw ConfigError("--q and --Q are mutually exclusive");
    if (!mixed && !o.has_q) throw ConfigError("need either --q or --Q");
    Eigen::MatrixXd Q;
    int n = o.n_gens;
    if (mixed) {
        Q = load_qmatrix(o.q_path);
        n = int(Q.rows());
        if (o.n_gens != 0 && o.n_gens != n)
            throw ConfigError("--n disagrees with the Q matrix size");
    } else if (n < 1) {
        throw ConfigError("--n must be >= 1");
    }
    if (o.depth < 2) throw ConfigError("--depth must be >= 2");

    Json cfg{{"n", n}, {"depth", o.depth}};
    if (mixed) {
        cfg["Q_file"] = o.q_path;
        Json qjson = Json::array();
        for (int i = 0; i < n; ++i) {
            Json row = Json::array();
            for (int j = 0; j < n; ++j) row.push_back(Q(i, j));
            qjson.push_back(row);
        }
        cfg["Q"] = qjson;
    } else {
        cfg["q"] = o.q;
    }
    if (!o.poly_path.empty()) cfg["poly"] = o.poly_path;
    Json rep = base_report("fock", o, cfg);

    return emit(o.output, o.format, rep, [&](Json& r) {
        const auto f = mixed ? fp::fockq::build_mixed(Q, o.depth)
                             : fp::fockq::build_fock(n, o.q, o.depth);
        std::vector<fp::fockq::HSKernelOp> A;
        for (int j = 0; j < n; ++j)
            A.push_back(mixed ? fp::fockq::xi_mixed(f, j) : fp::fockq::xi_q(f));
        r["discrepancy_bound"] = fp::fockq::discrepancy_bound(f);
        r["discrepancy_bound_truncated"] =
            fp::fockq::discrepancy_bound_truncated(f);

        std::vector<std::pair<std::string, fp::ncpoly::NCPoly>> battery;
        if (!o.poly_path.empty()) {
            auto p = load_poly(o.poly_path);
            if (p.max_generator() + 1 > n)
                throw ConfigError("polynomial uses more generators than --n");
            if (p.degree() + 1 > o.depth)
                throw ConfigError("polynomial degree + 1 exceeds --depth");
            battery.emplace_back("input", std::move(p));
        } else {
            const int max_len = std::min(4, o.depth - 1);
            for (const auto& w : word_battery(n, max_len))
                battery.emplace_back(word_name(w),
                                     fp::ncpoly::NCPoly::monomial(w, 1.0));
        }
        Json rows = Json::array();
        double max_res = 0;
        for (const auto& [name, p] : battery)
            for (int j = 0; j < n; ++j) {
                const double res =
                    fp::fockq::stein_identity_residual(f, A, p, j);
                max_res = std::max(max_res, res);
                Json row;
                row["poly"] = name;
                row["j"] = j;
                row["residual"] = res;
                rows.push_back(row);
            }
        r["max_residual"] = max_res;
        r["rows"] = rows;
    });
}

int do_ncpoly_check(const Opts& o) {
    const fp::ncpoly::NCPoly p = load_poly(o.poly_path);
    if (o.dim < 1) throw ConfigError("--dim must be >= 1");
    if (o.trials < 1) throw ConfigError("--trials must be >= 1");
    const int gens = std::max(1, p.max_generator() + 1);
    Json rep = base_report("ncpoly-check", o,
                           {{"poly", o.poly_path},
                            {"dim", o.dim},
                            {"trials", o.trials},
                            {"rng_seed", o.seed}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        r["degree"] = p.degree();
        r["generators"] = gens;
        r["selfadjoint"] = p.is_selfadjoint();
        r["r_norm_radius_1"] = p.r_norm(1.0);

        std::mt19937_64 rng(o.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double scale = 1.0 / std::sqrt(2.0 * o.dim);
        auto random_tuple = [&]() {
            fp::ncpoly::MatrixTuple t;
            for (int g = 0; g < gens; ++g) {
                fp::ncpoly::Mat m(o.dim, o.dim);
                for (int a = 0; a < o.dim; ++a)
                    for (int b = 0; b < o.dim; ++b)
                        m(a, b) = std::complex<double>(gauss(rng), gauss(rng));
                t.X.push_back(((m + m.adjoint()) * scale).eval());
            }
            return t;
        };

        Json rows = Json::array();
        double min_gap = std::numeric_limits<double>::infinity();
        bool all = true;
        for (int i = 0; i < o.trials; ++i) {
            const auto ta = random_tuple();
            const auto tb = random_tuple();
            const auto tr = fp::ncpoly::tangent_inequality_check(p, ta, tb);
            min_gap = std::min(min_gap, tr.gap);
            all = all && tr.holds;
            Json row;
            row["trial"] = i;
            row["lhs"] = tr.lhs;
            row["rhs"] = tr.rhs;
            row["gap"] = tr.gap;
            row["holds"] = tr.holds;
            rows.push_back(row);
        }
        r["min_gap"] = min_gap;
        r["all_hold"] = all;
        r["rows"] = rows;
    });
}

int do_check_all(const Opts& o) {
    Json spec;
    const Measure1D mu = load_measure(o.measure_path, o.grid, spec);
    require_positive(o.rho, "--rho");
    require_ts(o.ts);
    if (o.degree < 1) throw ConfigError("--degree must be >= 1");
    Json rep = base_report("check-all", o,
                           {{"measure", o.measure_path},
                            {"measure_spec", spec},
                            {"rho", o.rho},
                            {"t", o.ts},
                            {"degree", o.degree},
                            {"grid", o.grid}});
    return emit(o.output, o.format, rep, [&](Json& r) {
        std::vector<fp::ineq::IneqReport> rows;
        rows.push_back(fp::ineq::lsi_check(mu, o.rho));
        rows.push_back(fp::ineq::hsi_check(mu, o.rho, o.degree));
        rows.push_back(fp::ineq::deficit_check(mu, o.rho));
        const auto flows =
            fp::ineq::flow_checks(mu, o.rho, o.ts, o.degree, conv_opts(o));
        rows.insert(rows.end(), flows.begin(), flows.end());
        r["rows"] = ineq_rows(rows);
        bool all = true;
        for (const auto& row : rows) all = all && row.holds;
        r["all_hold"] = all;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical free probability toolkit"};
    app.require_subcommand(1);
    Opts o;

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--output", o.output, "report path (default stdout)");
        sc->add_option("--format", o.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sc->add_option("--grid", o.grid, "grid nodes for measure synthesis")
            ->check(CLI::Range(33, 200001));
    };
    auto add_measure = [&](CLI::App* sc) {
        sc->add_option("--measure", o.measure_path, "measure spec JSON")
            ->required();
    };

    auto* sc_entropy = app.add_subcommand("entropy", "free entropy quantities");
    add_measure(sc_entropy);
    sc_entropy->add_option("--rho", o.rho, "potential strength");
    add_common(sc_entropy);

    auto* sc_fisher = app.add_subcommand("fisher", "free Fisher information");
    add_measure(sc_fisher);
    sc_fisher->add_option("--rho", o.rho, "potential strength");
    add_common(sc_fisher);

    auto* sc_stein = app.add_subcommand("stein", "Stein kernel estimation");
    add_measure(sc_stein);
    sc_stein->add_option("--degree", o.degree, "polynomial degree");
    sc_stein->add_option("--rho", o.rho, "potential strength");
    add_common(sc_stein);

    auto* sc_transform =
        app.add_subcommand("transform", "Cauchy transform sweep");
    add_measure(sc_transform);
    sc_transform->add_option("--im", o.im_height, "height of the sweep line");
    sc_transform->add_option("--re-min", o.re_min, "left end of the sweep");
    sc_transform->add_option("--re-max", o.re_max, "right end of the sweep");
    sc_transform->add_option("--points", o.points, "sample count");
    add_common(sc_transform);

    auto* sc_flow =
        app.add_subcommand("flow", "Ornstein-Uhlenbeck flow sweep");
    add_measure(sc_flow);
    sc_flow->add_option("--rho", o.rho, "potential strength");
    sc_flow->add_option("--t", o.ts, "flow times");
    add_common(sc_flow);

    auto* sc_lsi = app.add_subcommand("lsi", "log-Sobolev check");
    add_measure(sc_lsi);
    sc_lsi->add_option("--rho", o.rho, "potential strength");
    add_common(sc_lsi);

    auto* sc_hsi = app.add_subcommand("hsi", "HSI check");
    add_measure(sc_hsi);
    sc_hsi->add_option("--rho", o.rho, "potential strength");
    sc_hsi->add_option("--degree", o.degree, "Stein kernel degree");
    add_common(sc_hsi);

    auto* sc_fc = app.add_subcommand("flow-checks", "flow lemma battery");
    add_measure(sc_fc);
    sc_fc->add_option("--rho", o.rho, "potential strength");
    sc_fc->add_option("--t", o.ts, "flow times");
    sc_fc->add_option("--degree", o.degree, "Stein kernel degree");
    add_common(sc_fc);

    auto* sc_deficit = app.add_subcommand("deficit", "entropy deficit check");
    add_measure(sc_deficit);
    sc_deficit->add_option("--rho", o.rho, "potential strength");
    add_common(sc_deficit);

    auto* sc_stam = app.add_subcommand("stam", "free Stam inequality check");
    add_measure(sc_stam);
    sc_stam->add_option("--measure2", o.measure2_path, "second measure spec")
        ->required();
    add_common(sc_stam);

    auto* sc_clt = app.add_subcommand("clt", "free CLT rate sweep");
    add_measure(sc_clt);
    sc_clt->add_option("--N", o.Ns, "summand counts");
    sc_clt->add_option("--weights", o.weights,
                       "custom weight vector (overrides --N)");
    add_common(sc_clt);

    auto* sc_fock = app.add_subcommand("fock", "q-deformed Fock space checks");
    sc_fock->add_option("--n", o.n_gens, "generator count");
    sc_fock->add_option("--q", o.q, "deformation parameter");
    sc_fock->add_option("--Q", o.q_path, "mixed deformation matrix file");
    sc_fock->add_option("--depth", o.depth, "Fock truncation depth");
    sc_fock->add_option("--poly", o.poly_path,
                        "test polynomial (default: word battery)");
    add_common(sc_fock);

    auto* sc_nc = app.add_subcommand("ncpoly-check",
                                     "polynomial sanity + tangent-line test");
    sc_nc->add_option("--poly", o.poly_path, "polynomial file")->required();
    sc_nc->add_option("--dim", o.dim, "matrix dimension");
    sc_nc->add_option("--trials", o.trials, "random tuple pairs");
    sc_nc->add_option("--rng-seed", o.seed, "random seed")->required();
    add_common(sc_nc);

    auto* sc_all = app.add_subcommand("check-all", "aggregate check battery");
    add_measure(sc_all);
    sc_all->add_option("--rho", o.rho, "potential strength");
    sc_all->add_option("--t", o.ts, "flow times");
    sc_all->add_option("--degree", o.degree, "Stein kernel degree");
    add_common(sc_all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    o.has_re_min = sc_transform->count("--re-min") > 0;
    o.has_re_max = sc_transform->count("--re-max") > 0;
    o.has_q = sc_fock->count("--q") > 0;

    try {
        if (app.got_subcommand(sc_entropy)) return do_entropy(o);
        if (app.got_subcommand(sc_fisher)) return do_fisher(o);
        if (app.got_subcommand(sc_stein)) return do_stein(o);
        if (app.got_subcommand(sc_transform)) return do_transform(o);
        if (app.got_subcommand(sc_flow)) return do_flow(o);
        if (app.got_subcommand(sc_lsi)) return do_lsi(o);
        if (app.got_subcommand(sc_hsi)) return do_hsi(o);
        if (app.got_subcommand(sc_fc)) return do_flow_checks(o);
        if (app.got_subcommand(sc_deficit)) return do_deficit(o);
        if (app.got_subcommand(sc_stam)) return do_stam(o);
        if (app.got_subcommand(sc_clt)) return do_clt(o);
        if (app.got_subcommand(sc_fock)) return do_fock(o);
        if (app.got_subcommand(sc_nc)) return do_ncpoly_check(o);
        if (app.got_subcommand(sc_all)) return do_check_all(o);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
