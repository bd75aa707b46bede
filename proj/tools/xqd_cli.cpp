// Command-line front end for the X-state discord library.
//
// Subcommands:
//   discord  - I, C, Q, optimal decomposition, and reconstructed measurement
//   classify - ellipse geometry, curvature class, and ellipse type
//   curve    - CSV dump of the boundary-entropy curve and its chord
//   sweep    - CSV scan of a one-parameter state family
//   audit    - oracle agreement suite on seeded random states
//
// Exit codes: 0 success, 1 audit tolerance breach, 2 invalid input.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xqd/xqd.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting helpers (CSV contract: 12 significant digits, comma separated).

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// State input: six flags or a JSON document {a,b,c,d,u,v} (optionally nested
// under a "state" key, which lets `discord --json` output round-trip).

struct StateArgs {
    std::optional<double> a, b, c, d, u, v;
    std::string state_file;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--a", a, "diagonal weight a");
        cmd->add_option("--b", b, "diagonal weight b");
        cmd->add_option("--c", c, "diagonal weight c");
        cmd->add_option("--d", d, "diagonal weight d");
        cmd->add_option("--u", u, "outer coherence u");
        cmd->add_option("--v", v, "inner coherence v");
        cmd->add_option("--state-file", state_file,
                        "JSON file with keys a,b,c,d,u,v (top level or under \"state\")");
    }

    xqd::XState resolve() const {
        if (!state_file.empty()) {
            std::ifstream in(state_file);
            if (!in) throw xqd::domain_error("cannot open state file: " + state_file);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw xqd::domain_error(std::string("state file is not valid JSON: ") + e.what());
            }
            if (j.contains("state")) j = j["state"];
            for (const char* key : {"a", "b", "c", "d", "u", "v"})
                if (!j.contains(key))
                    throw xqd::domain_error(std::string("state file misses key ") + key);
            return xqd::validate_xstate(j["a"].get<double>(), j["b"].get<double>(),
                                        j["c"].get<double>(), j["d"].get<double>(),
                                        j["u"].get<double>(), j["v"].get<double>());
        }
        if (!(a && b && c && d && u && v))
            throw xqd::domain_error("state requires --a --b --c --d --u --v or --state-file");
        return xqd::validate_xstate(*a, *b, *c, *d, *u, *v);
    }
};

json state_to_json(const xqd::XState& s) {
    return json{{"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}, {"u", s.u}, {"v", s.v}};
}

// Output sink: --out path or stdout.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw xqd::domain_error("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& out() { return *os; }
};

// ---------------------------------------------------------------------------
// Family specification for sweeps.  Coherences scale as u = k1(k) sqrt(ad)
// and v = k2(k) sqrt(bc) (or sqrt(ac) with --family-literal).  The scaling
// expressions accept "k", a numeric constant, or "<const>*k".

struct KExpr {
    double factor = 1.0;   // multiplies k when uses_k
    double constant = 0.0; // used when !uses_k
    bool uses_k = true;

    double operator()(double k) const { return uses_k ? factor * k : constant; }
};

KExpr parse_kexpr(std::string text) {
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char ch) {
                   return std::isspace(ch);
               }),
               text.end());
    if (text.empty()) throw xqd::domain_error("empty coherence scaling expression");
    KExpr e;
    const auto star = text.find('*');
    if (star != std::string::npos) {
        const std::string lhs = text.substr(0, star);
        const std::string rhs = text.substr(star + 1);
        if (rhs != "k" && lhs != "k")
            throw xqd::domain_error("scaling expression must be k, a number, or <number>*k: " +
                                    text);
        const std::string num = (rhs == "k") ? lhs : rhs;
        try {
            e.factor = std::stod(num);
        } catch (...) {
            throw xqd::domain_error("bad numeric factor in scaling expression: " + text);
        }
        e.uses_k = true;
        return e;
    }
    if (text == "k") {
        e.uses_k = true;
        e.factor = 1.0;
        return e;
    }
    try {
        e.constant = std::stod(text);
    } catch (...) {
        throw xqd::domain_error("bad scaling expression (expected k, number, or <number>*k): " +
                                text);
    }
    e.uses_k = false;
    return e;
}

struct FamilyArgs {
    std::optional<double> a, b, c, d;
    double kmin = 0, kmax = 0, kstep = 0;
    std::string k1_text = "k", k2_text = "k";
    std::string family_file;
    bool literal = false;  // v scales sqrt(ac) instead of sqrt(bc)

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--a", a, "diagonal weight a");
        cmd->add_option("--b", b, "diagonal weight b");
        cmd->add_option("--c", c, "diagonal weight c");
        cmd->add_option("--d", d, "diagonal weight d");
        cmd->add_option("--kmin", kmin, "sweep start");
        cmd->add_option("--kmax", kmax, "sweep end (inclusive)");
        cmd->add_option("--kstep", kstep, "sweep step (> 0)");
        cmd->add_option("--k1", k1_text, "u scaling: k, number, or <number>*k (default k)");
        cmd->add_option("--k2", k2_text, "v scaling: k, number, or <number>*k (default k)");
        cmd->add_option("--family-file", family_file,
                        "JSON file with a,b,c,d,kmin,kmax,kstep and optional k1,k2");
        cmd->add_flag("--family-literal", literal,
                      "scale v by sqrt(ac) instead of the default sqrt(bc)");
    }

    void load_file() {
        if (family_file.empty()) return;
        std::ifstream in(family_file);
        if (!in) throw xqd::domain_error("cannot open family file: " + family_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw xqd::domain_error(std::string("family file is not valid JSON: ") + e.what());
        }
        for (const char* key : {"a", "b", "c", "d", "kmin", "kmax", "kstep"})
            if (!j.contains(key))
                throw xqd::domain_error(std::string("family file misses key ") + key);
        a = j["a"].get<double>();
        b = j["b"].get<double>();
        c = j["c"].get<double>();
        d = j["d"].get<double>();
        kmin = j["kmin"].get<double>();
        kmax = j["kmax"].get<double>();
        kstep = j["kstep"].get<double>();
        if (j.contains("k1")) k1_text = j["k1"].is_string() ? j["k1"].get<std::string>()
                                                            : fmt17(j["k1"].get<double>());
        if (j.contains("k2")) k2_text = j["k2"].is_string() ? j["k2"].get<std::string>()
                                                            : fmt17(j["k2"].get<double>());
    }

    std::vector<double> k_values() const {
        if (!(kstep > 0)) throw xqd::domain_error("kstep must be positive");
        if (kmax < kmin) throw xqd::domain_error("kmax must be >= kmin");
        std::vector<double> ks;
        const int n = static_cast<int>(std::floor((kmax - kmin) / kstep + 0.5)) + 1;
        for (int i = 0; i < n; ++i) {
            const double k = kmin + i * kstep;
            if (k <= kmax + 0.5 * kstep) ks.push_back(k);
        }
        return ks;
    }

    xqd::XState state_at(double k, const KExpr& k1, const KExpr& k2) const {
        if (!(a && b && c && d))
            throw xqd::domain_error("family requires --a --b --c --d or --family-file");
        const double u = k1(k) * std::sqrt(*a * *d);
        const double rad = literal ? (*a * *c) : (*b * *c);
        const double v = k2(k) * std::sqrt(rad);
        return xqd::validate_xstate(*a, *b, *c, *d, u, v);
    }
};

// ---------------------------------------------------------------------------
// discord subcommand.

json decomposition_to_json(const xqd::Decomposition& dec) {
    json comps = json::array();
    for (const auto& c : dec.components)
        comps.push_back({{"weight", c.weight}, {"x", c.x}, {"z", c.z}});
    json j{{"kind", xqd::to_string(dec.kind)},
           {"s_bar_min", dec.s_bar_min},
           {"components", comps},
           {"curvature_fallback", dec.curvature_fallback}};
    j["z_star"] = dec.z_star ? json(*dec.z_star) : json(nullptr);
    j["p_star"] = dec.p_star ? json(*dec.p_star) : json(nullptr);
    return j;
}

int run_discord(const StateArgs& sa, bool as_json, const std::string& out_path) {
    const xqd::XState s = sa.resolve();
    const xqd::DiscordResult r = xqd::quantum_discord(s);
    const xqd::Povm povm = xqd::reconstruct_povm(s, r.decomposition);
    Sink sink(out_path);
    std::ostream& os = sink.out();
    if (as_json) {
        json jp = json::array();
        for (const auto& e : povm.elements)
            jp.push_back({{"t", e.t}, {"nx", e.nx}, {"nz", e.nz}});
        json j{{"state", state_to_json(s)},
               {"mutual_information", r.mutual_information},
               {"classical_correlation", r.classical_correlation},
               {"discord", r.discord},
               {"ellipse_class", xqd::to_string(r.ellipse_class)},
               {"decomposition", decomposition_to_json(r.decomposition)},
               {"povm", jp}};
        j["z_star"] = r.z_star ? json(*r.z_star) : json(nullptr);
        os << j.dump(2) << "\n";
        return 0;
    }
    os << "mutual_information    I = " << fmt12(r.mutual_information) << "\n"
       << "classical_correlation C = " << fmt12(r.classical_correlation) << "\n"
       << "discord               Q = " << fmt12(r.discord) << "\n"
       << "s_bar_min                 " << fmt12(r.decomposition.s_bar_min) << "\n"
       << "kind                      " << xqd::to_string(r.decomposition.kind) << "\n"
       << "ellipse_class             " << xqd::to_string(r.ellipse_class) << "\n";
    if (r.z_star) os << "z_star                    " << fmt12(*r.z_star) << "\n";
    if (r.decomposition.p_star)
        os << "p_star                    " << fmt12(*r.decomposition.p_star) << "\n";
    os << "components (weight, x, z):\n";
    for (const auto& c : r.decomposition.components)
        os << "  " << fmt12(c.weight) << "  " << fmt12(c.x) << "  " << fmt12(c.z) << "\n";
    os << "povm elements (t, nx, nz):\n";
    for (const auto& e : povm.elements)
        os << "  " << fmt12(e.t) << "  " << fmt12(e.nx) << "  " << fmt12(e.nz) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// classify subcommand.

int run_classify(const StateArgs& sa, bool as_json, const std::string& out_path) {
    const xqd::XState s = sa.resolve();
    const xqd::SteeringEllipse e = xqd::ellipse_from_xstate(s);
    const xqd::DiscordResult r = xqd::quantum_discord(s);
    std::string conv_tag = "n/a";
    double z_c = 0;
    bool has_zc = false;
    if (e.degeneracy != xqd::Degeneracy::Point && e.degeneracy != xqd::Degeneracy::FlatZ) {
        const xqd::EntropyCurve curve = xqd::make_curve(e);
        const xqd::ConvexityClass cc = xqd::classify_convexity(curve);
        conv_tag = xqd::to_string(cc.tag);
        if (cc.tag == xqd::ConvexityTag::SingleInflection) {
            z_c = cc.z_c;
            has_zc = true;
        }
    }
    Sink sink(out_path);
    std::ostream& os = sink.out();
    if (as_json) {
        json j{{"state", state_to_json(s)},
               {"l1", e.l1},
               {"l2", e.l2},
               {"l3", e.l3},
               {"z0", e.z0},
               {"z_A", e.z_A},
               {"z_B", e.z_B},
               {"z_G", e.z_G},
               {"z_H", e.z_H},
               {"degeneracy", xqd::to_string(e.degeneracy)},
               {"convexity", conv_tag},
               {"ellipse_class", xqd::to_string(r.ellipse_class)},
               {"kind", xqd::to_string(r.decomposition.kind)}};
        j["z_c"] = has_zc ? json(z_c) : json(nullptr);
        j["z_star"] = r.z_star ? json(*r.z_star) : json(nullptr);
        os << j.dump(2) << "\n";
        return 0;
    }
    os << "l1 = " << fmt12(e.l1) << "  l2 = " << fmt12(e.l2) << "  l3 = " << fmt12(e.l3)
       << "\n"
       << "z0 = " << fmt12(e.z0) << "  z_G = " << fmt12(e.z_G) << "  z_H = " << fmt12(e.z_H)
       << "\n"
       << "z_A = " << fmt12(e.z_A) << "  z_B = " << fmt12(e.z_B) << "\n"
       << "degeneracy    " << xqd::to_string(e.degeneracy) << "\n"
       << "convexity     " << conv_tag;
    if (has_zc) os << "  (z_c = " << fmt12(z_c) << ")";
    os << "\n"
       << "ellipse_class " << xqd::to_string(r.ellipse_class);
    if (r.z_star) os << "  (z_star = " << fmt12(*r.z_star) << ")";
    os << "\n"
       << "kind          " << xqd::to_string(r.decomposition.kind) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// curve subcommand.

int run_curve(const StateArgs& sa, int points, const std::string& out_path) {
    const xqd::XState s = sa.resolve();
    const xqd::SteeringEllipse e = xqd::ellipse_from_xstate(s);
    const xqd::EntropyCurve curve = xqd::make_curve(e);  // throws for flat shapes
    if (points < 2) throw xqd::domain_error("--points must be at least 2");
    Sink sink(out_path);
    std::ostream& os = sink.out();
    os << "z,s_horizontal,s_vertical,delta,d2\n";
    for (int i = 0; i < points; ++i) {
        const double z = curve.z_H + (curve.z_G - curve.z_H) * i / (points - 1);
        const double sh = xqd::s_horizontal(curve, z);
        const double sv = xqd::s_vertical(curve, z);
        std::string d2;
        try {
            d2 = fmt12(xqd::s_horizontal_d2(curve, z));
        } catch (const xqd::singular_point&) {
            d2.clear();  // singular point: empty derivative cell
        }
        os << fmt12(z) << ',' << fmt12(sh) << ',' << fmt12(sv) << ',' << fmt12(sh - sv) << ','
           << d2 << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep subcommand.

int run_sweep(FamilyArgs& fa, const std::string& out_path) {
    fa.load_file();
    const KExpr k1 = parse_kexpr(fa.k1_text);
    const KExpr k2 = parse_kexpr(fa.k2_text);
    const std::vector<double> ks = fa.k_values();
    // Validate the whole family up front: one bad k means a bad family.
    std::vector<xqd::XState> states;
    states.reserve(ks.size());
    for (double k : ks) states.push_back(fa.state_at(k, k1, k2));

    struct Row {
        double discord = 0, classical = 0;
        xqd::DecompositionKind kind = xqd::DecompositionKind::Horizontal;
        std::optional<double> z_star;
        xqd::EllipseClass eclass = xqd::EllipseClass::HorizontalType;
    };
    std::vector<Row> rows(ks.size());
    xqd::parallel_for(ks.size(), [&](std::size_t i) {
        const xqd::DiscordResult r = xqd::quantum_discord(states[i]);
        rows[i] = Row{r.discord, r.classical_correlation, r.decomposition.kind,
                      r.decomposition.z_star, r.ellipse_class};
    });

    Sink sink(out_path);
    std::ostream& os = sink.out();
    os << "k,discord,classical,kind,z_star,ellipse_class,transition\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const bool flip = i > 0 && rows[i].kind != rows[i - 1].kind;
        os << fmt12(ks[i]) << ',' << fmt12(rows[i].discord) << ',' << fmt12(rows[i].classical)
           << ',' << xqd::to_string(rows[i].kind) << ','
           << (rows[i].z_star ? fmt12(*rows[i].z_star) : std::string{}) << ','
           << xqd::to_string(rows[i].eclass) << ',' << (flip ? '1' : '0') << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// audit subcommand.

int run_audit(int n_states, std::uint64_t seed, double tol_ensemble, double tol_vn,
              double tol_sphere, const std::string& out_path) {
    struct Row {
        double ens_dev = 0;       // |s_bar_min - ensemble|
        double vn_gap = 0;        // vn - s_bar_min (>= -1e-9 expected)
        double vn_dev_hv = -1;    // |vn - s_bar_min| when kind is H/V, else -1
        double sphere_gain = 0;   // planar - sphere (> 0 means sphere found better)
        bool fallback = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(std::max(n_states, 0)));
    xqd::parallel_for(rows.size(), [&](std::size_t i) {
        auto rng = xqd::batch_engine(seed, i);
        const xqd::XState s = xqd::random_xstate(rng);
        const xqd::Decomposition dec = xqd::optimal_decomposition(s);
        const xqd::SteeringEllipse e = xqd::ellipse_from_xstate(s);
        Row row;
        row.fallback = dec.curvature_fallback;
        if (e.degeneracy != xqd::Degeneracy::Point && e.degeneracy != xqd::Degeneracy::FlatZ) {
            const xqd::OracleResult o = xqd::ensemble_oracle(e, e.z_B, 4096);
            row.ens_dev = std::abs(dec.s_bar_min - o.s_bar_min_estimate);
        }
        const double vn = xqd::vonneumann_oracle(s, 10000);
        const double sphere = xqd::vonneumann_oracle(s, 10000, true);
        row.vn_gap = vn - dec.s_bar_min;
        if (dec.kind == xqd::DecompositionKind::Horizontal ||
            dec.kind == xqd::DecompositionKind::Vertical)
            row.vn_dev_hv = std::abs(vn - dec.s_bar_min);
        row.sphere_gain = vn - sphere;
        rows[i] = row;
    });

    double max_ens = 0, min_vn_gap = 0, max_vn_hv = 0, max_sphere_gain = 0;
    int fallback_count = 0;
    for (const Row& r : rows) {
        max_ens = std::max(max_ens, r.ens_dev);
        min_vn_gap = std::min(min_vn_gap, r.vn_gap);
        max_vn_hv = std::max(max_vn_hv, r.vn_dev_hv);
        max_sphere_gain = std::max(max_sphere_gain, r.sphere_gain);
        if (r.fallback) ++fallback_count;
    }

    Sink sink(out_path);
    std::ostream& os = sink.out();
    bool ok = true;
    const auto report = [&](const char* label, double value, bool pass) {
        os << (pass ? "PASS" : "FAIL") << "  " << label << " = " << fmt12(value) << "\n";
        ok = ok && pass;
    };
    os << "audit states=" << n_states << " seed=" << seed << "\n";
    if (rows.empty()) {
        os << "no states requested; nothing to check\n";
        return 0;
    }
    report("max |s_bar_min - ensemble(4096)|", max_ens, max_ens <= tol_ensemble);
    report("min (vonNeumann(1e4) - s_bar_min)", min_vn_gap, min_vn_gap >= -1e-9);
    report("max |vonNeumann - s_bar_min| on two-outcome kinds", max_vn_hv, max_vn_hv <= tol_vn);
    report("max (planar - full-sphere) improvement", max_sphere_gain,
           max_sphere_gain <= tol_sphere);
    report("curvature-classification fallbacks", fallback_count, fallback_count == 0);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact quantum discord of two-qubit X states (steering-ellipse method)"};
    app.require_subcommand(1);

    StateArgs discord_state, classify_state, curve_state;
    bool discord_json = false, classify_json = false;
    std::string discord_out, classify_out, curve_out, sweep_out, audit_out;
    int curve_points = 200;
    FamilyArgs family;
    int audit_states = 100;
    std::uint64_t audit_seed = 1;
    double tol_ensemble = 2e-3, tol_vn = 1e-6, tol_sphere = 1e-7;

    CLI::App* cmd_discord = app.add_subcommand("discord", "correlations of one state");
    discord_state.add_flags(cmd_discord);
    cmd_discord->add_flag("--json", discord_json, "machine-readable output");
    cmd_discord->add_option("--out", discord_out, "write report to file");

    CLI::App* cmd_classify = app.add_subcommand("classify", "ellipse geometry and type");
    classify_state.add_flags(cmd_classify);
    cmd_classify->add_flag("--json", classify_json, "machine-readable output");
    cmd_classify->add_option("--out", classify_out, "write report to file");

    CLI::App* cmd_curve = app.add_subcommand("curve", "CSV dump of the entropy curve");
    curve_state.add_flags(cmd_curve);
    cmd_curve->add_option("--points", curve_points, "sample count (default 200)");
    cmd_curve->add_option("--out", curve_out, "write CSV to file");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "CSV scan of a state family");
    family.add_flags(cmd_sweep);
    cmd_sweep->add_option("--out", sweep_out, "write CSV to file");

    CLI::App* cmd_audit = app.add_subcommand("audit", "oracle agreement suite");
    cmd_audit->add_option("--states", audit_states, "number of random states (default 100)");
    cmd_audit->add_option("--seed", audit_seed, "RNG seed (default 1)");
    cmd_audit->add_option("--tol-ensemble", tol_ensemble,
                          "allowed |s_bar_min - ensemble| (default 2e-3)");
    cmd_audit->add_option("--tol-vn", tol_vn,
                          "allowed |vonNeumann - s_bar_min| on two-outcome kinds (default 1e-6)");
    cmd_audit->add_option("--tol-sphere", tol_sphere,
                          "allowed full-sphere improvement over planar (default 1e-7)");
    cmd_audit->add_option("--out", audit_out, "write report to file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_discord->parsed()) return run_discord(discord_state, discord_json, discord_out);
        if (cmd_classify->parsed())
            return run_classify(classify_state, classify_json, classify_out);
        if (cmd_curve->parsed()) return run_curve(curve_state, curve_points, curve_out);
        if (cmd_sweep->parsed()) return run_sweep(family, sweep_out);
        if (cmd_audit->parsed())
            return run_audit(audit_states, audit_seed, tol_ensemble, tol_vn, tol_sphere,
                             audit_out);
    } catch (const xqd::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
