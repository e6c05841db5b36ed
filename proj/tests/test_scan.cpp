#include <doctest.h>

#include <sstream>

#include "ptdist/scan.hpp"
#include "support.hpp"

using namespace ptdist;

namespace {

ScanConfig small_config() {
    ScanConfig cfg;
    cfg.dims = {{2, 2}, {2, 3}};
    cfg.samples = 6;
    cfg.seed = 42;
    cfg.parallelism = 1;
    return cfg;
}

void check_same_numbers(const ScanRecord& a, const ScanRecord& b) {
    CHECK(a.da == b.da);
    CHECK(a.db == b.db);
    CHECK(a.sample_index == b.sample_index);
    CHECK(a.origin == b.origin);
    CHECK(a.negativity == b.negativity);
    CHECK(a.sdp_value == b.sdp_value);
    CHECK(a.gap == b.gap);
    CHECK(a.binegativity_min_eig == b.binegativity_min_eig);
    CHECK(a.negative_binegativity == b.negative_binegativity);
    CHECK(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    CHECK(a.flagged == b.flagged);
}

}  // namespace

TEST_CASE("scan config validation") {
    auto cfg = small_config();
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = small_config();
    cfg.gap_threshold = cfg.sdp_tol / 2;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = small_config();
    cfg.dims.clear();
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("in-memory scan: one record per sample, summary recomputable") {
    const auto report = run_scan(small_config());
    REQUIRE(report.records.size() == 12);
    CHECK(report.summary == summarize(report.records, report.config.gap_threshold));
    CHECK(report.summary.violations == 0);
    CHECK(report.summary.non_optimal == 0);
    for (const auto& r : report.records) {
        CHECK(r.status == "Optimal");
        CHECK(r.gap >= -report.config.sdp_tol);
        if (r.binegativity_min_eig >= -1e-9) CHECK(std::abs(r.gap) <= report.config.sdp_tol);
        CHECK(r.origin == "induced");
    }
    CHECK(report.records[6].da == 2);
    CHECK(report.records[6].db == 3);
    CHECK(report.records[6].sample_index == 0);
}

TEST_CASE("scan results do not depend on thread count or reruns") {
    auto cfg = small_config();
    const auto a = run_scan(cfg);
    cfg.parallelism = 3;
    const auto b = run_scan(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) check_same_numbers(a.records[i], b.records[i]);

    cfg.seed = 43;
    const auto c = run_scan(cfg);
    CHECK(c.records[0].negativity != a.records[0].negativity);
}

TEST_CASE("samples of one dims entry do not depend on the others") {
    auto cfg = small_config();
    const auto both = run_scan(cfg);
    cfg.dims = {{2, 3}};
    const auto only = run_scan(cfg);
    for (std::size_t i = 0; i < only.records.size(); ++i) check_same_numbers(only.records[i], both.records[6 + i]);
}

TEST_CASE("scan files: header, rows, footer, sidecar") {
    const auto dir = testing::scratch_dir("scan-files");
    auto cfg = small_config();
    cfg.output = dir / "scan.csv";
    cfg.manifest = {"ptdist test", "seed: 42"};
    const auto report = run_scan(cfg);

    const auto file = read_scan_csv(cfg.output);
    CHECK(file.comments.front() == "ptdist test");
    REQUIRE(file.summary.has_value());
    CHECK(*file.summary == report.summary.to_json());
    REQUIRE(file.records.size() == report.records.size());
    for (std::size_t i = 0; i < file.records.size(); ++i) {
        check_same_numbers(file.records[i], report.records[i]);
        CHECK(file.records[i].wall_time_s == report.records[i].wall_time_s);
    }
    CHECK(summarize(file.records, cfg.gap_threshold) == report.summary);

    REQUIRE(report.summary_path.has_value());
    const auto side = nlohmann::json::parse(testing::slurp(*report.summary_path));
    CHECK(side["config"]["seed"] == 42);
    CHECK(side["manifest"][1] == "seed: 42");
    CHECK_FALSE(report.violations_path.has_value());
}

TEST_CASE("interrupted scans resume from the rows already written") {
    const auto dir = testing::scratch_dir("scan-resume");
    auto cfg = small_config();
    cfg.output = dir / "scan.csv";
    const auto full = run_scan(cfg);

    // Keep the preamble and the first 4 rows, then a torn row.
    const auto text = testing::slurp(cfg.output);
    std::istringstream in(text);
    std::string line, kept;
    int rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line[0] == '#') {
            if (line.rfind("# summary", 0) == 0) break;
            kept += line + '\n';
            continue;
        }
        if (!header) {
            header = true;
            kept += line + '\n';
            continue;
        }
        if (rows++ == 4) break;
        kept += line + '\n';
    }
    kept += "2,2,4,induc";
    std::ofstream(cfg.output) << kept;

    cfg.resume = true;
    const auto resumed = run_scan(cfg);
    REQUIRE(resumed.records.size() == full.records.size());
    for (std::size_t i = 0; i < full.records.size(); ++i) check_same_numbers(resumed.records[i], full.records[i]);
    // Rows carried over keep their original timing.
    CHECK(resumed.records[0].wall_time_s == full.records[0].wall_time_s);
    CHECK(read_scan_csv(cfg.output).records.size() == full.records.size());

    cfg.seed = 43;
    CHECK_THROWS_AS((void)run_scan(cfg), ValidationError);
}

TEST_CASE("feasibility scan with an injected state") {
    auto cfg = small_config();
    cfg.dims = {{2, 2}};
    cfg.injected.push_back(testing::even_mixture_example());
    const auto report = run_alt_scan(cfg);
    REQUIRE(report.records.size() == 7);
    CHECK(report.summary == summarize(report.records, cfg.gap_threshold));
    CHECK(report.summary.infeasible == 0);
    CHECK(report.summary.flagged == 0);
    for (const auto& r : report.records) {
        CHECK(r.status == "Optimal");
        CHECK(r.gap <= 1e-5);
    }
    const auto& inj = report.records.back();
    CHECK(inj.origin == "injected");
    CHECK(inj.da == 3);
    CHECK(inj.negative_binegativity);
    CHECK(report.summary.negative_binegativity == 1);
}

TEST_CASE("record formatting round trip") {
    ScanRecord r;
    r.da = 3;
    r.db = 4;
    r.sample_index = 17;
    r.origin = "induced";
    r.negativity = 0.1;
    r.sdp_value = std::numeric_limits<double>::quiet_NaN();
    r.gap = -1e-300;
    r.binegativity_min_eig = 1.0 / 3.0;
    r.status = "MaxIter";
    r.iterations = 50000;
    r.wall_time_s = 0.25;
    r.flagged = true;
    const auto back = parse_record(format_record(r));
    CHECK(back.negativity == r.negativity);
    CHECK(std::isnan(back.sdp_value));
    CHECK(back.gap == r.gap);
    CHECK(back.binegativity_min_eig == r.binegativity_min_eig);
    CHECK(back.status == "MaxIter");
    CHECK(back.flagged);
    CHECK_THROWS_AS((void)parse_record("1,2,3"), FormatError);
}

TEST_CASE("violations are counted from Optimal records only") {
    std::vector<ScanRecord> recs(3);
    recs[0].status = "Optimal";
    recs[0].gap = 1e-3;
    recs[1].status = "MaxIter";
    recs[1].gap = 1.0;
    recs[2].status = "Optimal";
    recs[2].gap = -2e-7;
    const auto s = summarize(recs, 1e-5);
    CHECK(s.violations == 1);
    CHECK(s.non_optimal == 1);
    CHECK(s.max_gap == 1e-3);
    CHECK(s.max_abs_gap == 1e-3);
    CHECK(s.mean_gap == doctest::Approx((1e-3 - 2e-7) / 2));
}
