#include "ptdist/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include <CLI11.hpp>

#include "ptdist/conic.hpp"
#include "ptdist/dynamics.hpp"
#include "ptdist/matrix_io.hpp"
#include "ptdist/scan.hpp"

namespace ptdist {

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join(const std::vector<std::string>& args) {
    std::string s;
    for (const auto& a : args) s += (s.empty() ? "" : " ") + a;
    return s;
}

std::string num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12) << v;
    return os.str();
}

std::filesystem::path out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? std::filesystem::path(env) : std::filesystem::current_path();
}

std::filesystem::path resolve_out(const std::string& given, const std::string& fallback) {
    if (!given.empty()) return given;
    return out_dir() / fallback;
}

/// "0,2:1" puts subsystems 0 and 2 on the untransposed side and 1 on the
/// transposed side. Empty means everything but the last factor : last factor.
Bipartition parse_cut(const std::string& text, const SubsystemDims& dims) {
    if (text.empty()) {
        if (dims.count() < 2) throw InputError("cut: state has a single subsystem");
        Bipartition b;
        for (std::size_t i = 0; i + 1 < dims.count(); ++i) b.first.push_back(i);
        b.second.push_back(dims.count() - 1);
        return b;
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("cut: expected the form 'i,j:k'");
    auto parse_side = [&](const std::string& s) {
        std::vector<std::size_t> v;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t pos = 0;
                const long idx = std::stol(item, &pos);
                if (pos != item.size() || idx < 0) throw InputError("cut: bad subsystem index '" + item + "'");
                v.push_back(static_cast<std::size_t>(idx));
            } catch (const std::logic_error&) {
                throw InputError("cut: bad subsystem index '" + item + "'");
            }
        }
        return v;
    };
    Bipartition b{parse_side(text.substr(0, colon)), parse_side(text.substr(colon + 1))};
    b.validate(dims);
    return b;
}

long parse_positive(const std::string& item) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(item, &pos);
    } catch (const std::logic_error&) {
        pos = 0;
    }
    if (pos == 0 || pos != item.size() || v < 1)
        throw InputError("dims: expected entries like 2x2 or 3, got '" + item + "'");
    return v;
}

std::vector<ScanDims> parse_dims_list(const std::string& text) {
    std::vector<ScanDims> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos) {
            const long d = parse_positive(item);
            out.push_back({d, d});
        } else {
            out.push_back({parse_positive(item.substr(0, x)), parse_positive(item.substr(x + 1))});
        }
    }
    if (out.empty()) throw InputError("dims: empty list");
    return out;
}

void write_manifest(std::ostream& os, const RunManifest& m) {
    for (const auto& l : m.lines()) os << "# " << l << '\n';
}

/// Sum_i p_i |ii><ii| up to round-off, read in the file's basis.
std::optional<RVector<double>> classical_diagonal(const DensityMatrixd& rho) {
    const auto& dims = rho.dims();
    if (dims.count() != 2 || dims[0] != dims[1]) return std::nullopt;
    const Eigen::Index d = dims[0];
    CMatrixXd rest = rho.matrix();
    RVector<double> p(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        p(i) = std::max(0.0, rho.matrix()(i * d + i, i * d + i).real());
        rest(i * d + i, i * d + i) = 0.0;
    }
    if (rest.cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
    p /= p.sum();
    return p;
}

int cmd_negativity(const std::string& file, const std::string& cut, std::ostream& out) {
    const auto rho = read_density_matrix(file);
    out << num(negativity(rho, parse_cut(cut, rho.dims()))) << '\n';
    return kExitOk;
}

int cmd_qppt(const std::string& file, double tol, long max_iter, std::ostream& out) {
    const auto rho = read_density_matrix(file);
    if (rho.dims().count() != 2) throw InputError("qppt: state must be bipartite");
    SdpSettings settings;
    settings.tol = tol;
    settings.max_iter = max_iter;
    const auto res = q_ppt(rho, settings);
    const double n = negativity(rho);
    out << "sdp_value " << num(res.result.value) << '\n'
        << "negativity " << num(n) << '\n'
        << "gap " << num(res.result.value - n) << '\n'
        << "status " << to_string(res.solution.status) << '\n'
        << "iterations " << res.solution.iterations << '\n';
    return res.solution.status == SdpStatus::Optimal ? kExitOk : kExitSolver;
}

struct ScanArgs {
    std::string dims = "2x2";
    std::uint64_t samples = 100;
    std::uint64_t seed = 42;
    std::string out;
    bool alt = false;
    double tol = 1e-6;
    double threshold = 1e-5;
    unsigned threads = 0;
    bool resume = false;
};

int cmd_scan(const ScanArgs& a, const RunManifest& manifest, std::ostream& out) {
    ScanConfig cfg;
    cfg.dims = parse_dims_list(a.dims);
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.sdp_tol = a.tol;
    cfg.gap_threshold = a.threshold;
    cfg.parallelism = a.threads;
    cfg.resume = a.resume;
    cfg.output = resolve_out(a.out, std::string(a.alt ? "scan-alt-" : "scan-") + std::to_string(a.seed) + ".csv");
    cfg.manifest = manifest.lines();
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const auto report = a.alt ? run_alt_scan(cfg) : run_scan(cfg);
    out << "csv " << cfg.output.string() << '\n';
    if (report.summary_path) out << "summary " << report.summary_path->string() << '\n';
    if (report.violations_path) out << "flagged " << report.violations_path->string() << '\n';
    out << report.summary.to_json().dump() << '\n';
    return kExitOk;
}

struct JcArgs {
    int nmax = 4;
    double g = 1.0;
    double tmax = 10.0;
    double dt = 0.01;
    std::string out;
};

int cmd_jc(const JcArgs& a, const RunManifest& manifest, std::ostream& out) {
    FockSpec spec{a.nmax, a.g};
    const auto times = time_grid(a.tmax, a.dt);
    const auto w = jc_witness(spec, times);
    const auto path = resolve_out(a.out, "jc.csv");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream csv(path);
    if (!csv) throw InputError("cannot write " + path.string());
    write_manifest(csv, manifest);
    csv << "t,negativity_ab,bound\n";
    for (std::size_t i = 0; i < w.times.size(); ++i)
        csv << format_double(w.times[i]) << ',' << format_double(w.negativity_ab[i]) << ',' << format_double(w.bound)
            << '\n';
    out << "csv " << path.string() << '\n'
        << "bound " << num(w.bound) << '\n'
        << "max_negativity " << num(w.max_negativity) << '\n'
        << "t_max " << num(w.t_max) << '\n'
        << "violated " << (w.violated ? "true" : "false") << '\n';
    if (w.t_first_violation) out << "t_first_violation " << num(*w.t_first_violation) << '\n';
    out << "max_sector_leakage " << num(w.max_sector_leakage) << '\n';
    return kExitOk;
}

struct WitnessArgs {
    std::string target;
    std::string cut;
    double tol = kMarkovTol;
    double tmax = 10.0;
    double dt = 0.05;
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_witness(const WitnessArgs& a, const RunManifest& manifest, std::ostream& out) {
    std::optional<Trajectory> traj;
    if (std::filesystem::is_regular_file(a.target)) {
        traj = read_trajectory_file(a.target);
    } else {
        const auto times = time_grid(a.tmax, a.dt);
        traj = builtin_model(a.target, times, a.seed);
        if (!traj) {
            std::string names;
            for (const auto& n : builtin_model_names()) names += (names.empty() ? "" : ", ") + n;
            throw InputError("witness: '" + a.target + "' is neither a file nor a built-in model (" + names + ")");
        }
    }
    const auto cut = parse_cut(a.cut, traj->dims);
    const auto hits = markov_witness(*traj, cut, a.tol);
    nlohmann::json v = nlohmann::json::array();
    for (const auto& h : hits) v.push_back({{"t_start", h.t_start}, {"t_end", h.t_end}, {"delta", h.delta}});
    nlohmann::json doc{{"manifest", manifest.lines()}, {"source", a.target}, {"tol", a.tol}, {"violations", v}};
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw InputError("cannot write " + a.out);
        f << doc.dump(2) << '\n';
    }
    out << doc.dump(2) << '\n';
    return kExitOk;
}

int cmd_quantify(const std::string& file, const std::string& set, std::uint64_t samples, std::uint64_t seed,
                 std::ostream& out) {
    const auto rho = read_density_matrix(file);
    if (rho.dims().count() != 2) throw InputError("quantify: state must be bipartite");
    if (set != "cc" && set != "prod") throw InputError("quantify: --set must be cc or prod");
    if (set == "cc" && std::abs(rho.purity() - 1.0) <= 1e-10) {
        const auto r = q_cc_pure(rho);
        out << "value " << num(r.value) << "\nmethod closed-form\n";
        return kExitOk;
    }
    if (set == "prod") {
        if (const auto p = classical_diagonal(rho)) {
            const auto r = q_prod_classical(ClassicalState<double>(*p, 1e-8));
            out << "value " << num(r.result.value) << "\nmethod closed-form\n";
            return kExitOk;
        }
    }
    const auto r = q_upper_bound_sampling(rho, set == "cc" ? UncorrelatedSet::CC : UncorrelatedSet::Prod, samples, seed);
    out << "value " << num(r.value) << "\nmethod upper-bound (sampling, " << samples << " samples, seed " << seed
        << ")\n";
    return kExitOk;
}

}  // namespace

std::vector<std::string> RunManifest::lines() const {
    return {"ptdist " + version, "command: " + command, "flags: " + flags, "seed: " + std::to_string(seed),
            "timestamp: " + timestamp};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial transpose distance toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string file, cut, set = "cc";
    double tol = 1e-6;
    long max_iter = SdpSettings{}.max_iter;
    std::uint64_t q_samples = 1000, q_seed = 42;
    ScanArgs sa;
    JcArgs ja;
    WitnessArgs wa;

    auto* neg = app.add_subcommand("negativity", "Negativity of a state file");
    neg->add_option("file", file, "matrix file")->required();
    neg->add_option("--cut", cut, "bipartition 'i,j:k' (right side is transposed)");

    auto* qppt = app.add_subcommand("qppt", "Distance to the PPT set by SDP");
    qppt->add_option("file", file, "matrix file")->required();
    qppt->add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
    qppt->add_option("--max-iter", max_iter, "iteration limit")->check(CLI::PositiveNumber);

    auto* scan = app.add_subcommand("scan", "Compare the SDP distance with the negativity on random states");
    scan->add_option("--dims", sa.dims, "comma-separated list like 2x2,3x3");
    scan->add_option("--samples", sa.samples, "samples per dims entry")->check(CLI::PositiveNumber);
    scan->add_option("--seed", sa.seed);
    scan->add_option("--out", sa.out, "CSV path");
    scan->add_flag("--alt", sa.alt, "use the feasibility form");
    scan->add_option("--tol", sa.tol, "solver tolerance")->check(CLI::PositiveNumber);
    scan->add_option("--threshold", sa.threshold, "gap threshold for violations");
    scan->add_option("--threads", sa.threads, "worker threads (0: all cores)");
    scan->add_flag("--resume", sa.resume, "keep rows of an interrupted run");

    auto* jc = app.add_subcommand("jc", "Two fields coupled through a two-level atom");
    jc->add_option("--nmax", ja.nmax, "photon cutoff per mode");
    jc->add_option("--g", ja.g, "coupling");
    jc->add_option("--tmax", ja.tmax);
    jc->add_option("--dt", ja.dt);
    jc->add_option("--out", ja.out, "CSV path");

    auto* wit = app.add_subcommand("witness", "Negativity increases along a trajectory");
    wit->add_option("target", wa.target, "trajectory file or built-in model (exchange, damping, cp-divisible)")
        ->required();
    wit->add_option("--cut", wa.cut, "bipartition 'i,j:k' (right side is transposed)");
    wit->add_option("--tol", wa.tol);
    wit->add_option("--tmax", wa.tmax, "time window for built-in models");
    wit->add_option("--dt", wa.dt, "time step for built-in models");
    wit->add_option("--seed", wa.seed, "seed for the cp-divisible model");
    wit->add_option("--out", wa.out, "JSON path");

    auto* quant = app.add_subcommand("quantify", "Correlation quantifier for the CC or product set");
    quant->add_option("file", file, "matrix file")->required();
    quant->add_option("--set", set, "cc or prod")->check(CLI::IsMember({"cc", "prod"}));
    quant->add_option("--samples", q_samples)->check(CLI::PositiveNumber);
    quant->add_option("--seed", q_seed);

    std::vector<const char*> argv{"ptdist"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    RunManifest manifest;
    manifest.flags = join(args);
    manifest.timestamp = utc_now();
    try {
        if (neg->parsed()) return cmd_negativity(file, cut, out);
        if (qppt->parsed()) return cmd_qppt(file, tol, max_iter, out);
        if (scan->parsed()) {
            manifest.command = "scan";
            manifest.seed = sa.seed;
            return cmd_scan(sa, manifest, out);
        }
        if (jc->parsed()) {
            manifest.command = "jc";
            return cmd_jc(ja, manifest, out);
        }
        if (wit->parsed()) {
            manifest.command = "witness";
            manifest.seed = wa.seed;
            return cmd_witness(wa, manifest, out);
        }
        if (quant->parsed()) return cmd_quantify(file, set, q_samples, q_seed, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace ptdist
