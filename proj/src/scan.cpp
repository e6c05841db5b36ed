#include "ptdist/scan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ptdist/random.hpp"

namespace ptdist {

namespace {

struct Task {
    ScanDims dims;
    std::uint64_t index;
    std::optional<std::size_t> injected;
};

std::vector<Task> make_tasks(const ScanConfig& cfg) {
    std::vector<Task> tasks;
    for (const auto& d : cfg.dims)
        for (std::uint64_t i = 0; i < cfg.samples; ++i) tasks.push_back({d, i, std::nullopt});
    for (std::size_t k = 0; k < cfg.injected.size(); ++k) {
        const auto& s = cfg.injected[k];
        tasks.push_back({{s.dims()[0], s.dims()[1]}, k, k});
    }
    return tasks;
}

/// The stream of a sample depends only on (seed, dA, dB, index).
SeededStream task_stream(std::uint64_t seed, const Task& t) {
    const auto key = splitmix64((static_cast<std::uint64_t>(t.dims.da) << 32) ^ static_cast<std::uint64_t>(t.dims.db));
    return SeededStream(seed).substream(splitmix64(key) ^ t.index);
}

ScanRecord run_task(const ScanConfig& cfg, const Task& t) {
    SdpSettings settings;
    settings.tol = cfg.sdp_tol;
    const auto t0 = std::chrono::steady_clock::now();
    ScanRecord r;
    try {
        if (t.injected) {
            r = scan_state(cfg.injected[*t.injected], cfg.mode, settings, cfg.gap_threshold);
        } else {
            auto stream = task_stream(cfg.seed, t);
            const auto rho = induced_mixed<double>(SubsystemDims{t.dims.da, t.dims.db}, stream, cfg.ancilla);
            r = scan_state(rho, cfg.mode, settings, cfg.gap_threshold);
        }
    } catch (const std::exception&) {
        r.status = "Error";
        r.negativity = r.sdp_value = r.gap = r.binegativity_min_eig = std::numeric_limits<double>::quiet_NaN();
    }
    r.da = t.dims.da;
    r.db = t.dims.db;
    r.sample_index = t.index;
    r.origin = t.injected ? "injected" : "induced";
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

bool same_task(const ScanRecord& r, const Task& t) {
    return r.da == t.dims.da && r.db == t.dims.db && r.sample_index == t.index &&
           r.origin == (t.injected ? "injected" : "induced");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("scan csv: bad number '" + s + "'");
    return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("scan csv: bad integer '" + s + "'");
    return v;
}

std::string header_line() {
    std::string h;
    for (const auto& c : scan_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

void write_preamble(std::ostream& out, const ScanConfig& cfg) {
    for (const auto& line : cfg.manifest) out << "# " << line << '\n';
    out << "# config: " << cfg.to_json().dump() << '\n';
    out << header_line() << '\n';
}

std::filesystem::path sidecar(const std::filesystem::path& p, const std::string& suffix) {
    auto s = p;
    s += suffix;
    return s;
}

ScanReport run(const ScanConfig& cfg) {
    cfg.validate();
    const auto tasks = make_tasks(cfg);
    std::vector<std::optional<ScanRecord>> slots(tasks.size());

    std::size_t done = 0;
    if (cfg.resume && !cfg.output.empty() && std::filesystem::exists(cfg.output)) {
        const auto previous = read_scan_csv(cfg.output);
        for (const auto& c : previous.comments)
            if (c.rfind("config: ", 0) == 0 && nlohmann::json::parse(c.substr(8), nullptr, false) != cfg.to_json())
                throw ValidationError("scan: cannot resume " + cfg.output.string() + " with a different config");
        for (const auto& r : previous.records) {
            if (done >= tasks.size() || !same_task(r, tasks[done])) break;
            slots[done++] = r;
        }
    }

    std::ofstream out;
    if (!cfg.output.empty()) {
        if (cfg.output.has_parent_path()) std::filesystem::create_directories(cfg.output.parent_path());
        out.open(cfg.output, std::ios::trunc);
        if (!out) throw FormatError("cannot write " + cfg.output.string());
        write_preamble(out, cfg);
        for (std::size_t i = 0; i < done; ++i) out << format_record(*slots[i]) << '\n';
        out.flush();
    }

    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::size_t> next{done};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            auto rec = run_task(cfg, tasks[i]);
            {
                std::lock_guard lock(mutex);
                slots[i] = std::move(rec);
            }
            ready.notify_all();
        }
    };

    const unsigned width = std::max(1u, cfg.parallelism ? cfg.parallelism : std::thread::hardware_concurrency());
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < width; ++w) pool.emplace_back(worker);

    // Only this thread touches the output file; rows go out in task order.
    for (std::size_t i = done; i < tasks.size(); ++i) {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[i].has_value(); });
        const std::string line = format_record(*slots[i]);
        lock.unlock();
        if (out.is_open()) {
            out << line << '\n';
            out.flush();
        }
    }
    pool.clear();

    ScanReport report{cfg, {}, {}, std::nullopt, std::nullopt};
    report.records.reserve(tasks.size());
    for (auto& s : slots) report.records.push_back(std::move(*s));
    report.summary = summarize(report.records, cfg.gap_threshold);

    if (out.is_open()) {
        out << "# summary: " << report.summary.to_json().dump() << '\n';
        out.close();

        nlohmann::json side{{"manifest", cfg.manifest}, {"config", cfg.to_json()},
                            {"summary", report.summary.to_json()}, {"csv", cfg.output.filename().string()}};
        report.summary_path = sidecar(cfg.output, ".summary.json");
        std::ofstream(*report.summary_path) << side.dump(2) << '\n';

        if (report.summary.flagged > 0) {
            nlohmann::json flagged = nlohmann::json::array();
            for (const auto& r : report.records)
                if (r.flagged) flagged.push_back(format_record(r));
            nlohmann::json v{{"manifest", cfg.manifest}, {"columns", scan_columns()}, {"flagged", flagged}};
            report.violations_path = sidecar(cfg.output, ".flagged.json");
            std::ofstream(*report.violations_path) << v.dump(2) << '\n';
        }
    }
    return report;
}

}  // namespace

void ScanConfig::validate() const {
    if (samples < 1) throw ValidationError("scan: samples must be at least 1");
    if (dims.empty() && injected.empty()) throw ValidationError("scan: nothing to sample");
    if (!(sdp_tol > 0.0)) throw ValidationError("scan: sdp tol must be positive");
    if (!(gap_threshold >= sdp_tol)) throw ValidationError("scan: gap threshold must be at least the sdp tol");
    if (ancilla < 0) throw ValidationError("scan: ancilla dimension must be non-negative");
    for (const auto& d : dims)
        if (d.da < 1 || d.db < 1) throw DimensionError("scan: dimensions must be positive");
    for (const auto& s : injected)
        if (s.dims().count() != 2) throw DimensionError("scan: injected states must be bipartite");
}

nlohmann::json ScanConfig::to_json() const {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& x : dims) d.push_back({x.da, x.db});
    return {{"dims", d},
            {"samples", samples},
            {"seed", seed},
            {"sdp_tol", sdp_tol},
            {"gap_threshold", gap_threshold},
            {"ancilla", ancilla},
            {"mode", mode == ScanMode::Distance ? "distance" : "alternative"},
            {"injected", injected.size()},
            {"stream", std::string(kStreamAlgorithm)}};
}

nlohmann::json ScanSummary::to_json() const {
    return {{"records", records},
            {"optimal", optimal},
            {"non_optimal", non_optimal},
            {"infeasible", infeasible},
            {"negative_binegativity", negative_binegativity},
            {"violations", violations},
            {"flagged", flagged},
            {"max_gap", max_gap},
            {"max_abs_gap", max_abs_gap},
            {"mean_gap", mean_gap}};
}

ScanSummary summarize(const std::vector<ScanRecord>& records, double gap_threshold) {
    ScanSummary s;
    double sum = 0.0;
    bool any = false;
    for (const auto& r : records) {
        ++s.records;
        if (r.negative_binegativity) ++s.negative_binegativity;
        if (r.flagged) ++s.flagged;
        if (r.status == "Infeasible") ++s.infeasible;
        if (r.status != "Optimal") {
            ++s.non_optimal;
            continue;
        }
        ++s.optimal;
        if (r.gap > gap_threshold) ++s.violations;
        s.max_gap = any ? std::max(s.max_gap, r.gap) : r.gap;
        s.max_abs_gap = std::max(s.max_abs_gap, std::abs(r.gap));
        sum += r.gap;
        any = true;
    }
    if (s.optimal > 0) s.mean_gap = sum / double(s.optimal);
    return s;
}

ScanRecord scan_state(const DensityMatrixd& rho, ScanMode mode, const SdpSettings& settings, double gap_threshold) {
    ScanRecord r;
    r.da = rho.dims()[0];
    r.db = rho.dims()[1];
    r.negativity = negativity(rho);
    r.binegativity_min_eig = binegativity_min_eig(rho);
    r.negative_binegativity = r.binegativity_min_eig < -kPsdTol;

    if (mode == ScanMode::Distance) {
        const auto out = q_ppt(rho, settings);
        r.sdp_value = out.result.value;
        r.status = to_string(out.solution.status);
        r.iterations = out.solution.iterations;
        r.gap = r.sdp_value - r.negativity;
        r.flagged = out.solution.status == SdpStatus::Optimal && r.gap > gap_threshold;
    } else {
        const auto out = check_conjecture_alt(rho, settings);
        r.status = to_string(out.solution.status);
        r.iterations = out.solution.iterations;
        if (out.witness) {
            r.sdp_value = pt_distance<double>(rho.matrix(), partial_transpose<double>(*out.witness, rho.dims()),
                                              rho.dims());
        } else {
            r.sdp_value = std::numeric_limits<double>::quiet_NaN();
        }
        r.gap = r.sdp_value - r.negativity;
        r.flagged = out.solution.status == SdpStatus::Infeasible ||
                    (out.solution.status == SdpStatus::Optimal && r.gap > gap_threshold);
    }
    return r;
}

ScanReport run_scan(const ScanConfig& cfg) {
    auto c = cfg;
    c.mode = ScanMode::Distance;
    return run(c);
}

ScanReport run_alt_scan(ScanConfig cfg) {
    cfg.mode = ScanMode::Alternative;
    return run(cfg);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_record(const ScanRecord& r) {
    std::string s;
    s += std::to_string(r.da) + ',' + std::to_string(r.db) + ',' + std::to_string(r.sample_index) + ',' + r.origin;
    for (double v : {r.negativity, r.sdp_value, r.gap, r.binegativity_min_eig}) s += ',' + format_double(v);
    s += r.negative_binegativity ? ",1," : ",0,";
    s += r.status + ',' + std::to_string(r.iterations) + ',' + format_double(r.wall_time_s);
    s += r.flagged ? ",1" : ",0";
    return s;
}

ScanRecord parse_record(const std::string& line) {
    const auto cells = split_csv(line);
    if (cells.size() != scan_columns().size()) throw FormatError("scan csv: wrong number of columns");
    ScanRecord r;
    r.da = parse_int<Eigen::Index>(cells[0]);
    r.db = parse_int<Eigen::Index>(cells[1]);
    r.sample_index = parse_int<std::uint64_t>(cells[2]);
    r.origin = cells[3];
    r.negativity = parse_double(cells[4]);
    r.sdp_value = parse_double(cells[5]);
    r.gap = parse_double(cells[6]);
    r.binegativity_min_eig = parse_double(cells[7]);
    r.negative_binegativity = cells[8] == "1";
    r.status = cells[9];
    r.iterations = parse_int<long>(cells[10]);
    r.wall_time_s = parse_double(cells[11]);
    r.flagged = cells[12] == "1";
    return r;
}

ScanFile read_scan_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    ScanFile f;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            if (body.rfind("summary: ", 0) == 0) f.summary = nlohmann::json::parse(body.substr(9));
            f.comments.push_back(std::move(body));
            continue;
        }
        if (!header) {
            if (line != header_line()) throw FormatError("scan csv: unexpected header");
            header = true;
            continue;
        }
        try {
            f.records.push_back(parse_record(line));
        } catch (const FormatError&) {
            break;  // torn final line of an interrupted run
        }
    }
    return f;
}

}  // namespace ptdist
