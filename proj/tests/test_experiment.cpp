#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstring>
#include <sstream>

#include "ccq/experiment.hpp"
#include "ccq/sampling.hpp"

using namespace ccq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "ccq_experiment_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_info_config() {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "info";
    cfg["master_seed"] = 42;
    cfg["channel"] = {{"preset", "bb84-pair"}};
    cfg["input_distribution"] = "uniform";
    return cfg;
}

} // namespace

TEST_CASE("channel serialization round-trips exactly") {
    RngStream rng = RngStream::derive(5, 0, stream_tag::from_name("io-test"));
    std::vector<DensityOperator> states{random_density(3, rng), random_density(3, rng)};
    const CqChannel d(states);
    const json doc = io::cq_channel_to_json(d);
    const CqChannel back = io::cq_channel_from_json(doc);
    for (std::size_t x = 0; x < 2; ++x)
        CHECK(back.state(x).matrix().max_abs_diff(d.state(x).matrix()) == 0.0);
    // identity on the decimal representation
    CHECK(io::cq_channel_to_json(back).dump() == doc.dump());

    const ClassicalChannel w = ClassicalChannel::bsc(0.05);
    const json wdoc = io::classical_channel_to_json(w);
    const ClassicalChannel wback = io::classical_channel_from_json(wdoc);
    CHECK(wback.kernel() == w.kernel());
    CHECK(io::classical_channel_to_json(wback).dump() == wdoc.dump());

    const InputDistribution p({0.125, 0.875});
    CHECK(io::distribution_from_json(io::distribution_to_json(p)).probabilities() ==
          p.probabilities());
}

TEST_CASE("info campaign writes report with the bb84 value") {
    const fs::path out = scratch_dir("info");
    json cfg = base_info_config();
    cfg["classical_channel"] = {{"preset", "bsc"}, {"p", 0.1}};
    std::ostringstream log;
    const int status = experiment::run("info", cfg, {{}, out.string(), {}, {}}, log);
    CHECK(status == 0);

    const json report = json::parse(slurp(out / "info_report.json"));
    const double lp = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    const double expected = -lp * std::log(lp) - (1.0 - lp) * std::log(1.0 - lp);
    CHECK(std::abs(report.at("i_pd").get<double>() - expected) <= 1e-9);
    CHECK(fs::exists(out / "info_report.csv"));
    CHECK(fs::exists(out / "manifest.json"));

    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("kind") == "info");
    CHECK(manifest.at("rng_algorithm") == "splitmix64");
    CHECK(manifest.at("exit_status") == 0);
}

TEST_CASE("config validation failures exit 2") {
    std::ostringstream log;

    json missing = base_info_config();
    missing.erase("master_seed");
    CHECK(experiment::run("info", missing, {}, log) == 2);

    json unknown = base_info_config();
    unknown["trails"] = 10; // typo must be rejected
    CHECK(experiment::run("info", unknown, {}, log) == 2);

    json wrong_kind = base_info_config();
    CHECK(experiment::run("resolve", wrong_kind, {}, log) == 2);

    json no_schema = base_info_config();
    no_schema.erase("schema_version");
    CHECK(experiment::run("info", no_schema, {}, log) == 2);

    json bad_preset = base_info_config();
    bad_preset["channel"] = {{"preset", "unheard-of"}};
    CHECK(experiment::run("info", bad_preset, {}, log) == 2);

    // malformed config missing trials for resolve
    json resolve;
    resolve["schema_version"] = 1;
    resolve["kind"] = "resolve";
    resolve["master_seed"] = 1;
    resolve["channel"] = {{"preset", "orthogonal"}};
    resolve["input_distribution"] = "uniform";
    resolve["n"] = 2;
    resolve["rate"] = 1.0;
    CHECK(experiment::run("resolve", resolve, {}, log) == 2);
}

TEST_CASE("resolve campaign: identical seeds give identical CSV bytes") {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "resolve";
    cfg["master_seed"] = 7;
    cfg["channel"] = {{"preset", "orthogonal"}};
    cfg["input_distribution"] = "uniform";
    cfg["n"] = 3;
    cfg["rate"] = 1.5 * std::log(2.0);
    cfg["trials"] = 40;

    const fs::path out_a = scratch_dir("resolve_a");
    const fs::path out_b = scratch_dir("resolve_b");
    std::ostringstream log;
    CHECK(experiment::run("resolve", cfg, {{}, out_a.string(), {}, {}}, log) == 0);
    CHECK(experiment::run("resolve", cfg, {{}, out_b.string(), {}, {}}, log) == 0);
    CHECK(slurp(out_a / "resolve_trials.csv") == slurp(out_b / "resolve_trials.csv"));
    CHECK(slurp(out_a / "resolve_summary.json") == slurp(out_b / "resolve_summary.json"));

    // a different seed changes the trials
    const fs::path out_c = scratch_dir("resolve_c");
    CHECK(experiment::run("resolve", cfg, {std::uint64_t{8}, out_c.string(), {}, {}}, log) == 0);
    CHECK(slurp(out_a / "resolve_trials.csv") != slurp(out_c / "resolve_trials.csv"));

    // thread override must not change the bytes
    const fs::path out_d = scratch_dir("resolve_d");
    CHECK(experiment::run("resolve", cfg, {{}, out_d.string(), {}, unsigned{2}}, log) == 0);
    CHECK(slurp(out_a / "resolve_trials.csv") == slurp(out_d / "resolve_trials.csv"));
}

TEST_CASE("lemmas campaign passes on presets") {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "lemmas";
    cfg["master_seed"] = 11;
    cfg["channel"] = {{"preset", "orthogonal"}};
    cfg["input_distribution"] = "uniform";
    cfg["n"] = 3;
    cfg["epsilon"] = 0.1;
    cfg["trials"] = 150;

    const fs::path out = scratch_dir("lemmas");
    std::ostringstream log;
    CHECK(experiment::run("lemmas", cfg, {{}, out.string(), {}, {}}, log) == 0);
    const json summary = json::parse(slurp(out / "lemma_summary.json"));
    CHECK(summary.at("all_pass").get<bool>());
    CHECK(summary.at("checks").size() >= 8);
}

TEST_CASE("wiretap campaign end to end") {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "wiretap";
    cfg["master_seed"] = 1021;
    cfg["channel"] = {{"preset", "depolarized-pair"}, {"q", 0.5}};
    cfg["classical_channel"] = {{"preset", "identity"}, {"size", 2}};
    cfg["input_distribution"] = "uniform";
    cfg["n"] = 4;
    cfg["rate"] = 0.5 * std::log(2.0);
    cfg["rate_tilde"] = 0.25 * std::log(2.0);
    cfg["trials"] = 200;

    const fs::path out = scratch_dir("wiretap");
    std::ostringstream log;
    CHECK(experiment::run("wiretap", cfg, {{}, out.string(), {}, {}}, log) == 0);
    const json summary = json::parse(slurp(out / "wiretap_summary.json"));
    CHECK(summary.at("L") == 4);
    CHECK(summary.at("M") == 2);
    CHECK(summary.at("triangle_certificate_pass").get<bool>());
    CHECK(summary.at("delta").get<double>() <=
          2.0 * summary.at("max_dist_to_product").get<double>() + 1e-9);

    const json code = json::parse(slurp(out / "wiretap_code.json"));
    CHECK(code.at("sub_codebooks").size() == 4);
    CHECK(code.at("sub_codebooks")[0].size() == 2);
    CHECK(code.at("sub_codebooks")[0][0].size() == 4);

    // infeasible blocklength surfaces as a config-level failure
    json bad = cfg;
    bad["n"] = 3;
    const fs::path out2 = scratch_dir("wiretap_bad");
    CHECK(experiment::run("wiretap", bad, {{}, out2.string(), {}, {}}, log) == 2);
}

TEST_CASE("advantage campaign audits a built code") {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "advantage";
    cfg["master_seed"] = 31;
    cfg["channel"] = {{"preset", "depolarized-pair"}, {"q", 0.5}};
    cfg["classical_channel"] = {{"preset", "identity"}, {"size", 2}};
    cfg["input_distribution"] = "uniform";
    cfg["n"] = 4;
    cfg["rate"] = 0.5 * std::log(2.0);
    cfg["rate_tilde"] = 0.25 * std::log(2.0);
    cfg["trials"] = 1;
    cfg["priors_per_partition"] = 3;

    const fs::path out = scratch_dir("advantage");
    std::ostringstream log;
    CHECK(experiment::run("advantage", cfg, {{}, out.string(), {}, {}}, log) == 0);
    const json summary = json::parse(slurp(out / "advantage_summary.json"));
    CHECK(summary.at("all_pass").get<bool>());
    CHECK(summary.at("L") == 4);
    // 7 binary + singleton + trivial partitions, 3 priors each
    CHECK(summary.at("rows") == 9 * 3);
}

TEST_CASE("sweep campaign fits a slope") {
    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "sweep";
    cfg["master_seed"] = 13;
    cfg["channel"] = {{"preset", "orthogonal"}};
    cfg["input_distribution"] = "uniform";
    cfg["n_grid"] = {2, 3, 4, 5};
    cfg["rate"] = 1.5 * std::log(2.0);
    cfg["trials"] = 60;

    const fs::path out = scratch_dir("sweep");
    std::ostringstream log;
    CHECK(experiment::run("sweep", cfg, {{}, out.string(), {}, {}}, log) == 0);
    const json summary = json::parse(slurp(out / "sweep_summary.json"));
    CHECK_FALSE(summary.at("fit").at("degenerate").get<bool>());
    CHECK(summary.at("fit").at("slope").get<double>() < 0.0);
    CHECK_FALSE(summary.at("fit").at("regime_violated").get<bool>());

    // below I(P,D): regime violation flagged
    json low = cfg;
    low["rate"] = 0.5 * std::log(2.0);
    low["n_grid"] = {2, 3, 4};
    const fs::path out2 = scratch_dir("sweep_low");
    CHECK(experiment::run("sweep", low, {{}, out2.string(), {}, {}}, log) == 0);
    const json s2 = json::parse(slurp(out2 / "sweep_summary.json"));
    CHECK(s2.at("fit").at("regime_violated").get<bool>());

    // constant channel: degenerate (all distances zero)
    json flat = cfg;
    flat["channel"] = {{"preset", "constant"}};
    flat["n_grid"] = {2, 3};
    flat["rate"] = 0.7;
    const fs::path out3 = scratch_dir("sweep_flat");
    CHECK(experiment::run("sweep", flat, {{}, out3.string(), {}, {}}, log) == 0);
    const json s3 = json::parse(slurp(out3 / "sweep_summary.json"));
    CHECK(s3.at("fit").at("degenerate").get<bool>());
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
    RngStream rng = RngStream::derive(6, 0, stream_tag::from_name("io-test"));
    for (int k = 0; k < 1000; ++k) {
        double x = (rng.next_double() - 0.5) * std::pow(10.0, double(rng.next_below(41)) - 20.0);
        if (k == 0) x = 0.0;
        const std::string s = io::format_g17(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("lemmas campaign on a 3-input channel") {
    RngStream rng = RngStream::derive(17, 0, stream_tag::from_name("io-test"));
    std::vector<DensityOperator> states{random_density(2, rng), random_density(2, rng),
                                        random_density(2, rng)};
    const CqChannel d(states);

    json cfg;
    cfg["schema_version"] = 1;
    cfg["kind"] = "lemmas";
    cfg["master_seed"] = 19;
    cfg["channel"] = io::cq_channel_to_json(d);
    cfg["input_distribution"] = std::vector<double>{0.2, 0.5, 0.3};
    cfg["n"] = 2;
    cfg["epsilon"] = 0.25;
    cfg["trials"] = 100;

    const fs::path out = scratch_dir("lemmas3");
    std::ostringstream log;
    CHECK(experiment::run("lemmas", cfg, {{}, out.string(), {}, {}}, log) == 0);
    const json summary = json::parse(slurp(out / "lemma_summary.json"));
    CHECK(summary.at("all_pass").get<bool>());
}

TEST_CASE("config hash is stable and out-independent") {
    json a = base_info_config();
    json b = base_info_config();
    a["out"] = "somewhere";
    b["out"] = "elsewhere";
    json ha = a;
    ha.erase("out");
    json hb = b;
    hb.erase("out");
    CHECK(experiment::config_hash(ha) == experiment::config_hash(hb));
    hb["master_seed"] = 43;
    CHECK(experiment::config_hash(ha) != experiment::config_hash(hb));
}
