#include "ccq/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <vector>

#include "ccq/info.hpp"
#include "ccq/kernels.hpp"
#include "ccq/resolvability.hpp"
#include "ccq/sampling.hpp"
#include "ccq/security.hpp"
#include "ccq/wiretap.hpp"

namespace ccq::io {

using nlohmann::json;

json cq_channel_to_json(const CqChannel& d) {
    json doc;
    doc["dim"] = d.dim();
    doc["input_size"] = d.input_size();
    json states = json::array();
    for (std::size_t x = 0; x < d.input_size(); ++x) {
        json entries = json::array();
        const ComplexMatrix& m = d.state(x).matrix();
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                entries.push_back({m(i, j).real(), m(i, j).imag()});
        states.push_back(std::move(entries));
    }
    doc["states"] = std::move(states);
    return doc;
}

CqChannel cq_channel_from_json(const json& doc) {
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto input_size = doc.at("input_size").get<std::size_t>();
    const json& states = doc.at("states");
    if (states.size() != input_size)
        throw ConfigInvalid("cq channel document: states count differs from input_size");
    std::vector<DensityOperator> parsed;
    for (const json& entries : states) {
        if (entries.size() != dim * dim)
            throw ConfigInvalid("cq channel document: state entry count differs from dim^2");
        ComplexMatrix m(dim, dim);
        std::size_t k = 0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j, ++k)
                m(i, j) = Complex(entries[k][0].get<double>(), entries[k][1].get<double>());
        parsed.push_back(DensityOperator::make(std::move(m)));
    }
    return CqChannel(std::move(parsed));
}

json classical_channel_to_json(const ClassicalChannel& w) {
    json doc;
    doc["input_size"] = w.input_size();
    doc["output_size"] = w.output_size();
    json kernel = json::array();
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < w.output_size(); ++y) row.push_back(w.prob(x, y));
        kernel.push_back(std::move(row));
    }
    doc["kernel"] = std::move(kernel);
    return doc;
}

ClassicalChannel classical_channel_from_json(const json& doc) {
    const auto input_size = doc.at("input_size").get<std::size_t>();
    const auto output_size = doc.at("output_size").get<std::size_t>();
    std::vector<double> kernel;
    kernel.reserve(input_size * output_size);
    for (const json& row : doc.at("kernel"))
        for (const json& v : row) kernel.push_back(v.get<double>());
    return ClassicalChannel(input_size, output_size, std::move(kernel));
}

json distribution_to_json(const InputDistribution& p) { return json(p.probabilities()); }

InputDistribution distribution_from_json(const json& doc) {
    return InputDistribution(doc.get<std::vector<double>>());
}

std::string format_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace ccq::io

namespace ccq::experiment {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

void require_fields(const json& obj, const std::string& ctx,
                    std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional) {
    if (!obj.is_object()) throw ConfigInvalid(ctx + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* r : required) known = known || key == r;
        for (const char* o : optional) known = known || key == o;
        if (!known) throw ConfigInvalid(ctx + ": unknown field '" + key + "'");
    }
    for (const char* r : required) {
        if (!obj.contains(r)) throw ConfigInvalid(ctx + ": missing required field '" + r + "'");
    }
}

double get_double(const json& obj, const char* field) {
    const json& v = obj.at(field);
    if (!v.is_number()) throw ConfigInvalid(std::string("field '") + field + "' must be a number");
    return v.get<double>();
}

std::size_t get_size(const json& obj, const char* field) {
    const json& v = obj.at(field);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
        throw ConfigInvalid(std::string("field '") + field + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

CqChannel parse_cq_channel(const json& doc) {
    if (doc.is_object() && doc.contains("preset")) {
        require_fields(doc, "channel", {"preset"}, {"q"});
        const std::string name = doc.at("preset").get<std::string>();
        const double q = doc.contains("q") ? get_double(doc, "q") : 0.5;
        return preset_cq(name, q);
    }
    require_fields(doc, "channel", {"dim", "input_size", "states"}, {});
    return io::cq_channel_from_json(doc);
}

ClassicalChannel parse_classical_channel(const json& doc) {
    if (doc.is_object() && doc.contains("preset")) {
        require_fields(doc, "classical_channel", {"preset"}, {"p", "size"});
        const std::string name = doc.at("preset").get<std::string>();
        if (name == "bsc") return ClassicalChannel::bsc(get_double(doc, "p"));
        if (name == "identity")
            return ClassicalChannel::identity(doc.contains("size") ? get_size(doc, "size") : 2);
        throw ConfigInvalid("unknown classical preset '" + name + "'");
    }
    require_fields(doc, "classical_channel", {"input_size", "output_size", "kernel"}, {});
    return io::classical_channel_from_json(doc);
}

InputDistribution parse_distribution(const json& doc, std::size_t input_size) {
    if (doc.is_string()) {
        if (doc.get<std::string>() == "uniform") return InputDistribution::uniform(input_size);
        throw ConfigInvalid("input_distribution: unknown keyword '" + doc.get<std::string>() + "'");
    }
    const InputDistribution p = io::distribution_from_json(doc);
    if (p.size() != input_size)
        throw ConfigInvalid("input_distribution size differs from the channel input alphabet");
    return p;
}

AlphaGrid parse_alpha_grid(const json& doc) {
    require_fields(doc, "alpha_grid", {"above_one", "below_one"}, {});
    AlphaGrid grid;
    grid.above_one = doc.at("above_one").get<std::vector<double>>();
    grid.below_one = doc.at("below_one").get<std::vector<double>>();
    return grid;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
}

struct RunContext {
    std::string kind;
    json config;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    unsigned threads = 1;
    std::filesystem::path out;
};

json exponent_to_json(const ExponentReport& e) {
    json doc;
    doc["rate"] = e.rate;
    doc["epsilon"] = e.epsilon;
    doc["i_pd"] = e.i_pd;
    doc["gamma"] = e.gamma;
    doc["gamma1"] = e.gamma1;
    json fams = json::array();
    for (int f = 0; f < 4; ++f)
        fams.push_back({{"family", f + 1}, {"alpha", e.best_alpha[f]}, {"value", e.best_value[f]}});
    doc["families"] = std::move(fams);
    return doc;
}

int run_info(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "info config",
                   {"schema_version", "kind", "master_seed", "channel", "input_distribution"},
                   {"classical_channel", "alphas", "out", "threads", "trials"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());
    std::optional<ClassicalChannel> w;
    if (ctx.config.contains("classical_channel"))
        w = parse_classical_channel(ctx.config.at("classical_channel"));
    const std::vector<double> alphas = ctx.config.contains("alphas")
                                           ? ctx.config.at("alphas").get<std::vector<double>>()
                                           : default_alpha_grid();

    const InfoReport report = info_report(d, p, w ? &*w : nullptr, alphas);

    json summary;
    summary["i_pw"] = report.i_pw;
    summary["i_pd"] = report.i_pd;
    summary["h_p"] = report.h_p;
    summary["h_u"] = report.h_u;
    summary["alpha_min"] = report.alpha_min;
    json grid = json::array();
    for (const auto& entry : report.renyi_grid)
        grid.push_back({{"alpha", entry.alpha},
                        {"conditional", entry.conditional},
                        {"output", entry.output}});
    summary["renyi"] = std::move(grid);
    write_text(ctx.out / "info_report.json", summary.dump(2) + "\n");

    CsvWriter csv(ctx.out / "info_report.csv");
    csv.row({"quantity", "alpha", "value_nats"});
    if (std::isfinite(report.i_pw)) csv.row({"i_pw", "", io::format_g17(report.i_pw)});
    csv.row({"i_pd", "", io::format_g17(report.i_pd)});
    csv.row({"h_p", "", io::format_g17(report.h_p)});
    csv.row({"h_u", "", io::format_g17(report.h_u)});
    for (const auto& entry : report.renyi_grid) {
        csv.row({"renyi_conditional", io::format_g17(entry.alpha),
                 io::format_g17(entry.conditional)});
        csv.row({"renyi_output", io::format_g17(entry.alpha), io::format_g17(entry.output)});
    }
    log << "info: I(P,D) = " << report.i_pd << " nats\n";
    return 0;
}

int run_resolve(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "resolve config",
                   {"schema_version", "kind", "master_seed", "channel", "input_distribution", "n",
                    "rate", "trials"},
                   {"epsilon", "concentration", "out", "threads"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());
    const std::size_t n = get_size(ctx.config, "n");
    const double rate = get_double(ctx.config, "rate");
    std::optional<double> epsilon;
    if (ctx.config.contains("epsilon")) epsilon = get_double(ctx.config, "epsilon");

    const ResolvabilityResult result =
        estimate_expected_distance(d, p, n, rate, ctx.trials, ctx.seed, ctx.threads, epsilon);

    CsvWriter csv(ctx.out / "resolve_trials.csv");
    csv.row({"trial", "seed", "n", "M", "distance"});
    for (std::size_t t = 0; t < result.trials; ++t)
        csv.row({std::to_string(t), std::to_string(result.trial_seeds[t]), std::to_string(n),
                 std::to_string(result.m_size), io::format_g17(result.distances[t])});

    json summary;
    summary["n"] = result.n;
    summary["m_size"] = result.m_size;
    summary["trials"] = result.trials;
    summary["rate"] = result.rate;
    summary["mean"] = result.mean;
    summary["std_error"] = result.std_error;
    if (result.exponent) {
        summary["epsilon"] = result.exponent->epsilon;
        summary["theoretical_exponent"] = exponent_to_json(*result.exponent);
        const AlphaGrid grid;
        summary["alphas"] = {{"above_one", grid.above_one}, {"below_one", grid.below_one}};
    }
    int status = 0;
    if (ctx.config.contains("concentration")) {
        const json& cc = ctx.config.at("concentration");
        require_fields(cc, "concentration", {"m_size", "trials", "thresholds"}, {"swap_count"});
        const auto report = concentration_experiment(
            d, p, n, get_size(cc, "m_size"), get_size(cc, "trials"),
            cc.at("thresholds").get<std::vector<double>>(), ctx.seed, ctx.threads,
            cc.contains("swap_count") ? get_size(cc, "swap_count") : 100);
        CsvWriter tail_csv(ctx.out / "concentration.csv");
        tail_csv.row({"threshold", "frequency", "bound", "std_error", "pass"});
        for (const auto& tail : report.tails)
            tail_csv.row({io::format_g17(tail.threshold), io::format_g17(tail.frequency),
                          io::format_g17(tail.bound), io::format_g17(tail.std_error),
                          tail.pass ? "1" : "0"});
        json conc;
        conc["n"] = report.n;
        conc["m_size"] = report.m_size;
        conc["trials"] = report.trials;
        conc["mean"] = report.mean;
        conc["swap_count"] = report.swap_count;
        conc["swap_max_change"] = report.swap_max_change;
        conc["swap_bound"] = report.swap_bound;
        conc["swap_pass"] = report.swap_pass;
        conc["pass"] = report.pass;
        summary["concentration"] = conc;
        write_text(ctx.out / "concentration.json", conc.dump(2) + "\n");
        if (!report.pass) {
            log << "concentration: tail or swap bound violated (see concentration.csv)\n";
            status = 1;
        }
    }
    write_text(ctx.out / "resolve_summary.json", summary.dump(2) + "\n");
    log << "resolve: mean distance " << result.mean << " +- " << result.std_error
        << " at M=" << result.m_size << "\n";
    return status;
}

int run_wiretap(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "wiretap config",
                   {"schema_version", "kind", "master_seed", "channel", "classical_channel",
                    "input_distribution", "n", "rate", "rate_tilde", "trials"},
                   {"decoder_threshold", "compute_security", "out", "threads"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const ClassicalChannel w = parse_classical_channel(ctx.config.at("classical_channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());
    const std::size_t n = get_size(ctx.config, "n");
    const double rate = get_double(ctx.config, "rate");
    const double rate_tilde = get_double(ctx.config, "rate_tilde");

    const WiretapCode code = build_wiretap_code(p, w, d, n, rate, rate_tilde, ctx.seed);
    DecoderConfig dec;
    if (ctx.config.contains("decoder_threshold")) {
        dec.threshold = get_double(ctx.config, "decoder_threshold");
        const double i_pw = mutual_information_classical(p, w);
        if (!(dec.threshold > 0.0 && dec.threshold < static_cast<double>(n) * i_pw))
            throw ConfigInvalid("decoder_threshold outside (0, n I(P,W))");
    } else {
        dec = default_decoder_config(p, w, d, n, rate);
    }

    const ErrorEstimate est =
        estimate_average_error(code, p, w, dec, ctx.trials, ctx.seed, ctx.threads);

    json code_doc;
    code_doc["n"] = code.n;
    code_doc["L"] = code.message_count;
    code_doc["M"] = code.randomization_size;
    code_doc["R"] = code.rate;
    code_doc["R_tilde"] = code.rate_tilde;
    code_doc["seed"] = code.seed;
    json books = json::array();
    for (const Codebook& c : code.sub_codebooks) {
        json words = json::array();
        for (const Word& word : c.words) words.push_back(word);
        books.push_back(std::move(words));
    }
    code_doc["sub_codebooks"] = std::move(books);
    write_text(ctx.out / "wiretap_code.json", code_doc.dump(2) + "\n");

    CsvWriter csv(ctx.out / "wiretap_trials.csv");
    csv.row({"trial", "message", "decoded", "correct"});
    for (const auto& rec : est.records)
        csv.row({std::to_string(rec.trial), std::to_string(rec.message),
                 std::to_string(rec.decoded), rec.correct ? "1" : "0"});

    json summary;
    summary["n"] = code.n;
    summary["L"] = code.message_count;
    summary["M"] = code.randomization_size;
    summary["rate"] = code.rate;
    summary["rate_tilde"] = code.rate_tilde;
    summary["decoder_threshold"] = dec.threshold;
    summary["message_prior"] = "uniform";
    summary["error_rate"] = est.error_rate;
    summary["error_std_error"] = est.std_error;

    int status = 0;
    const bool compute_security = !ctx.config.contains("compute_security") ||
                                  ctx.config.at("compute_security").get<bool>();
    if (compute_security) {
        try {
            const SecuritySummary sec = distinguishing_security(code, d, p);
            summary["delta"] = sec.delta;
            summary["max_dist_to_product"] = sec.max_dist_to_product;
            const bool triangle_ok = sec.delta <= 2.0 * sec.max_dist_to_product + 1e-9;
            summary["triangle_certificate_pass"] = triangle_ok;
            if (!triangle_ok) {
                log << "wiretap: delta " << sec.delta << " exceeds twice the certificate "
                    << sec.max_dist_to_product << "\n";
                status = 1;
            }
        } catch (const DimensionOverflow& e) {
            throw DimensionOverflow(std::string(e.what()) + " (dim=" + std::to_string(d.dim()) +
                                    ", n=" + std::to_string(n) + ")");
        }
    }
    write_text(ctx.out / "wiretap_summary.json", summary.dump(2) + "\n");
    log << "wiretap: L=" << code.message_count << " M=" << code.randomization_size
        << " error=" << est.error_rate << "\n";
    return status;
}

int run_advantage(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "advantage config",
                   {"schema_version", "kind", "master_seed", "channel", "classical_channel",
                    "input_distribution", "n", "rate", "rate_tilde", "trials"},
                   {"priors_per_partition", "partition_sample", "out", "threads"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const ClassicalChannel w = parse_classical_channel(ctx.config.at("classical_channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());
    const std::size_t n = get_size(ctx.config, "n");

    const WiretapCode code = build_wiretap_code(p, w, d, n, get_double(ctx.config, "rate"),
                                                get_double(ctx.config, "rate_tilde"), ctx.seed);
    const std::vector<DensityOperator> states = eavesdropper_states(code, d);
    const std::size_t message_count = states.size();

    const std::size_t priors_per = ctx.config.contains("priors_per_partition")
                                       ? get_size(ctx.config, "priors_per_partition")
                                       : 5;
    const std::size_t sample = ctx.config.contains("partition_sample")
                                   ? get_size(ctx.config, "partition_sample")
                                   : 200;
    RngStream audit_rng = RngStream::derive(ctx.seed, 0, stream_tag::audit());
    std::vector<MessagePartition> partitions;
    if (message_count >= 2)
        partitions = message_count <= 8
                         ? exhaustive_binary_partitions(message_count)
                         : sampled_binary_partitions(message_count, sample, audit_rng);
    if (message_count >= 2) partitions.push_back(singleton_partition(message_count));
    partitions.push_back(trivial_partition(message_count));
    const std::vector<MessagePrior> priors = random_priors(message_count, priors_per, audit_rng);

    const AdvantageAuditReport report = advantage_audit(states, priors, partitions);

    CsvWriter csv(ctx.out / "advantage_audit.csv");
    csv.row({"partition_id", "prior_id", "guess", "succ_lower", "succ_exact_or_blank",
             "advantage", "delta_bound", "pass"});
    for (const auto& row : report.rows)
        csv.row({std::to_string(row.partition_id), std::to_string(row.prior_id),
                 io::format_g17(row.guess), io::format_g17(row.succ_lower),
                 row.succ_exact ? io::format_g17(*row.succ_exact) : "",
                 io::format_g17(row.advantage), io::format_g17(row.delta_bound),
                 row.pass ? "1" : "0"});

    json summary;
    summary["L"] = message_count;
    summary["delta"] = report.delta;
    summary["partitions"] = partitions.size();
    summary["priors_per_partition"] = priors_per;
    summary["rows"] = report.rows.size();
    summary["all_pass"] = report.all_pass;
    write_text(ctx.out / "advantage_summary.json", summary.dump(2) + "\n");
    log << "advantage: delta=" << report.delta << " rows=" << report.rows.size()
        << (report.all_pass ? " all pass" : " VIOLATION") << "\n";
    return report.all_pass ? 0 : 1;
}

int run_lemmas(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "lemmas config",
                   {"schema_version", "kind", "master_seed", "channel", "input_distribution", "n",
                    "epsilon", "trials"},
                   {"alpha_grid", "out", "threads"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());
    const std::size_t n = get_size(ctx.config, "n");
    const double epsilon = get_double(ctx.config, "epsilon");
    const AlphaGrid grid = ctx.config.contains("alpha_grid")
                               ? parse_alpha_grid(ctx.config.at("alpha_grid"))
                               : AlphaGrid{};

    struct CheckRow {
        std::string name;
        double statistic = 0.0;
        double bound = 0.0;
        bool pass = false;
        std::string note;
    };
    std::vector<CheckRow> rows;
    bool all_pass = true;
    const auto add = [&](std::string name, double stat, double bound, bool pass,
                         std::string note = "") {
        all_pass = all_pass && pass;
        rows.push_back({std::move(name), stat, bound, pass, std::move(note)});
    };

    // Typical-term operator bounds, exhaustive over x^n when |X|^n <= 81.
    std::vector<Word> words;
    {
        double count = 1.0;
        for (std::size_t i = 0; i < n; ++i) count *= static_cast<double>(d.input_size());
        if (count <= 81.0) {
            Word word(n, 0);
            for (;;) {
                words.push_back(word);
                std::size_t i = n;
                for (; i-- > 0;) {
                    if (++word[i] < d.input_size()) break;
                    word[i] = 0;
                }
                if (i == static_cast<std::size_t>(-1)) break;
            }
        } else {
            RngStream rng = RngStream::derive(ctx.seed, 1, stream_tag::sampling());
            for (int k = 0; k < 20; ++k) words.push_back(sample_word(p, n, rng));
        }
    }
    try {
        const auto rep = check_typical_bounds(d, p, n, epsilon, words);
        add("typical-joint-operator-bound", rep.worst_item1, 1e-9, true);
        add("typical-output-operator-bound", rep.worst_item2, 1e-9, true);
        add("typical-projector-trace", rep.theta_trace, rep.theta_trace_bound, true);
    } catch (const BoundViolated& e) {
        add("typical-bounds", 0.0, 0.0, false, e.what());
    }

    // Exact atypical masses against the Markov exponent bounds.
    try {
        const auto rep = atypical_mass(d, p, n, epsilon, grid);
        double tightest_joint = std::numeric_limits<double>::infinity();
        double tightest_output = std::numeric_limits<double>::infinity();
        for (const auto& b : rep.bounds) {
            double& slot = b.joint ? tightest_joint : tightest_output;
            slot = std::min(slot, b.bound);
        }
        add("atypical-joint-mass", rep.exact_joint_mass, tightest_joint, true);
        add("atypical-output-mass", rep.exact_output_mass, tightest_output, true);
        add("atypical-split-trace", rep.expected_gamma_trace,
            1.0 - rep.exact_joint_mass - rep.exact_output_mass, rep.split_pass);
    } catch (const BoundViolated& e) {
        add("atypical-mass", 0.0, 0.0, false, e.what());
    } catch (const EnumerationBudgetExceeded& e) {
        add("atypical-mass", 0.0, 0.0, false, e.what());
    }

    // Symmetrization inequality for the single-letter and Gamma-weighted maps.
    {
        RngStream rng = RngStream::derive(ctx.seed, 2, stream_tag::sampling());
        std::vector<std::pair<double, ComplexMatrix>> single;
        for (std::size_t x = 0; x < d.input_size(); ++x)
            single.emplace_back(p[x], d.state(x).matrix());
        const auto rep = symmetrization_check(single, 4, ctx.trials, rng);
        add("symmetrization-single-letter", rep.lhs_mean,
            std::min(rep.rhs_adjoint_first, rep.rhs_adjoint_last) + 3.0 * rep.lhs_std_error,
            rep.pass);

        const TypicalityProjectors proj(d, p, n, epsilon);
        std::vector<std::pair<double, ComplexMatrix>> weighted;
        double total = 0.0;
        for (const Word& xn : words) {
            double prob = 1.0;
            for (const std::size_t x : xn) prob *= p[x];
            total += prob;
            weighted.emplace_back(prob, multiply(proj.gamma(xn), d_nfold(d, xn).matrix()));
        }
        if (std::abs(total - 1.0) <= 1e-9) {
            const auto rep2 = symmetrization_check(weighted, 8, ctx.trials, rng);
            add("symmetrization-gamma-weighted", rep2.lhs_mean,
                std::min(rep2.rhs_adjoint_first, rep2.rhs_adjoint_last) +
                    3.0 * rep2.lhs_std_error,
                rep2.pass);
        }
    }

    // Operator Jensen inequality for the square root.
    {
        RngStream rng = RngStream::derive(ctx.seed, 3, stream_tag::sampling());
        const std::size_t dim = d.dim();
        const auto rep = operator_jensen_sqrt_check(
            [dim](RngStream& r) { return random_psd(dim, r); }, ctx.trials, rng);
        add("jensen-sqrt", rep.max_gap_eigenvalue, 1e-8, rep.pass);
    }

    // Norm ordering, submultiplicativity, duality witness.
    {
        RngStream rng = RngStream::derive(ctx.seed, 4, stream_tag::sampling());
        double worst_order = 0.0, worst_submul = 0.0, worst_ideal = 0.0, worst_duality = 0.0;
        for (int k = 0; k < 10; ++k) {
            const ComplexMatrix a = random_complex_gaussian(3, 3, rng);
            const ComplexMatrix b = random_complex_gaussian(3, 3, rng);
            worst_order = std::max(worst_order, operator_norm(a) - trace_norm(a));
            worst_submul = std::max(worst_submul, trace_norm(multiply(a, b)) -
                                                      trace_norm(a) * trace_norm(b));
            worst_ideal = std::max(worst_ideal,
                                   trace_norm(multiply(multiply(a, b), a.adjoint())) -
                                       operator_norm(a) * trace_norm(b) * operator_norm(a));
            ComplexMatrix h(3, 3);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
            auto dec = spectral_decompose(h);
            double tn = 0.0;
            for (const double v : dec.eigenvalues) tn += std::abs(v);
            for (double& v : dec.eigenvalues) v = v >= 0.0 ? 1.0 : -1.0;
            worst_duality = std::max(
                worst_duality, std::abs(std::abs(multiply(h, dec.reconstruct()).trace()) - tn));
        }
        add("norm-ordering-slack", worst_order, 1e-10, worst_order <= 1e-10);
        add("norm-submultiplicative-slack", worst_submul, 1e-9, worst_submul <= 1e-9);
        add("norm-ideal-slack", worst_ideal, 1e-9, worst_ideal <= 1e-9);
        add("norm-duality-witness-gap", worst_duality, 1e-9, worst_duality <= 1e-9);
    }

    CsvWriter csv(ctx.out / "lemma_checks.csv");
    csv.row({"check", "statistic", "bound", "pass"});
    for (const auto& row : rows)
        csv.row({row.name, io::format_g17(row.statistic), io::format_g17(row.bound),
                 row.pass ? "1" : "0"});

    json summary;
    summary["n"] = n;
    summary["epsilon"] = epsilon;
    json checks = json::array();
    for (const auto& row : rows) {
        json r;
        r["check"] = row.name;
        r["statistic"] = row.statistic;
        r["bound"] = row.bound;
        r["pass"] = row.pass;
        if (!row.note.empty()) r["note"] = row.note;
        checks.push_back(std::move(r));
    }
    summary["checks"] = std::move(checks);
    summary["all_pass"] = all_pass;
    write_text(ctx.out / "lemma_summary.json", summary.dump(2) + "\n");
    log << "lemmas: " << rows.size() << " checks, " << (all_pass ? "all pass" : "VIOLATION")
        << "\n";
    return all_pass ? 0 : 1;
}

int run_sweep(const RunContext& ctx, std::ostream& log) {
    require_fields(ctx.config, "sweep config",
                   {"schema_version", "kind", "master_seed", "channel", "input_distribution",
                    "trials"},
                   {"n_grid", "rate", "rate_grid", "n", "epsilon", "out", "threads"});
    const CqChannel d = parse_cq_channel(ctx.config.at("channel"));
    const InputDistribution p =
        parse_distribution(ctx.config.at("input_distribution"), d.input_size());

    const bool sweep_n = ctx.config.contains("n_grid");
    const bool sweep_rate = ctx.config.contains("rate_grid");
    if (sweep_n == sweep_rate)
        throw ConfigInvalid("sweep config: provide exactly one of n_grid or rate_grid");
    if (sweep_n && !ctx.config.contains("rate"))
        throw ConfigInvalid("sweep config: n_grid requires a fixed rate");
    if (sweep_rate && !ctx.config.contains("n"))
        throw ConfigInvalid("sweep config: rate_grid requires a fixed n");

    std::vector<std::pair<std::size_t, double>> grid;
    if (sweep_n) {
        const double rate = get_double(ctx.config, "rate");
        for (const std::size_t n : ctx.config.at("n_grid").get<std::vector<std::size_t>>())
            grid.emplace_back(n, rate);
    } else {
        const std::size_t n = get_size(ctx.config, "n");
        for (const double rate : ctx.config.at("rate_grid").get<std::vector<double>>())
            grid.emplace_back(n, rate);
    }
    if (grid.empty()) throw ConfigInvalid("sweep config: grid is empty");
    std::optional<double> epsilon;
    if (ctx.config.contains("epsilon")) epsilon = get_double(ctx.config, "epsilon");

    CsvWriter csv(ctx.out / "sweep_trials.csv");
    csv.row({"n", "rate", "M", "trial", "seed", "distance"});
    json points = json::array();
    std::vector<std::pair<double, double>> fit_data; // (n, log mean)
    bool degenerate = false;
    for (const auto& [n, rate] : grid) {
        const ResolvabilityResult res =
            estimate_expected_distance(d, p, n, rate, ctx.trials, ctx.seed, ctx.threads, epsilon);
        for (std::size_t t = 0; t < res.trials; ++t)
            csv.row({std::to_string(n), io::format_g17(rate), std::to_string(res.m_size),
                     std::to_string(t), std::to_string(res.trial_seeds[t]),
                     io::format_g17(res.distances[t])});
        points.push_back({{"n", n},
                          {"rate", rate},
                          {"m_size", res.m_size},
                          {"mean", res.mean},
                          {"std_error", res.std_error}});
        if (res.mean > 1e-12)
            fit_data.emplace_back(static_cast<double>(n), std::log(res.mean));
        else
            degenerate = true;
    }

    json summary;
    summary["points"] = std::move(points);
    const double i_pd = holevo_information(d, p);
    summary["i_pd"] = i_pd;
    if (sweep_n) {
        json fit;
        fit["degenerate"] = degenerate;
        if (!degenerate && fit_data.size() >= 2) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
            const double k = static_cast<double>(fit_data.size());
            for (const auto& [x, y] : fit_data) {
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double denom = sxx - sx * sx / k;
            const double slope = (sxy - sx * sy / k) / denom;
            const double intercept = (sy - slope * sx) / k;
            double ss_resid = 0.0;
            for (const auto& [x, y] : fit_data) {
                const double r = y - (intercept + slope * x);
                ss_resid += r * r;
            }
            fit["slope"] = slope;
            fit["intercept"] = intercept;
            if (fit_data.size() > 2)
                fit["slope_std_error"] = std::sqrt(ss_resid / (k - 2.0) / denom);
        }
        const double rate = grid.front().second;
        fit["regime_violated"] = rate <= i_pd;
        summary["fit"] = std::move(fit);
        if (rate <= i_pd) log << "sweep: rate below I(P,D); resolvability regime violated\n";
    }
    write_text(ctx.out / "sweep_summary.json", summary.dump(2) + "\n");
    log << "sweep: " << grid.size() << " grid points written\n";
    return 0;
}

void write_manifest(const RunContext& ctx, int status, const std::string& started,
                    const std::string& error) {
    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["kind"] = ctx.kind;
    manifest["tool_version"] = tool_version();
    manifest["master_seed"] = ctx.seed;
    json hash_input = ctx.config;
    hash_input.erase("out");
    manifest["config_hash"] = config_hash(hash_input);
    manifest["rng_algorithm"] = std::string(RngStream::algorithm());
    manifest["seed_rule"] = "stream = splitmix64(mix(master_seed, trial_index, module_tag))";
    manifest["kernel_lane"] = kernels::active().name;
    manifest["max_dim"] = max_dim();
    manifest["started_at"] = started;
    manifest["finished_at"] = utc_now();
    manifest["exit_status"] = status;
    if (!error.empty()) manifest["error"] = error;
    write_text(ctx.out / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace

std::string tool_version() { return "ccqlab 1.0.0"; }

std::uint64_t config_hash(const json& effective) {
    const std::string dump = effective.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : dump) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

int run(const std::string& kind, json config, const Overrides& overrides, std::ostream& log) {
    RunContext ctx;
    ctx.kind = kind;
    try {
        if (!config.is_object()) throw ConfigInvalid("config root must be a JSON object");
        if (!config.contains("schema_version") ||
            config.at("schema_version").get<int>() != kSchemaVersion)
            throw ConfigInvalid("config must declare schema_version = 1");
        if (!config.contains("kind") || config.at("kind").get<std::string>() != kind)
            throw ConfigInvalid("config kind does not match subcommand '" + kind + "'");

        if (overrides.seed) config["master_seed"] = *overrides.seed;
        if (overrides.trials) config["trials"] = *overrides.trials;
        if (overrides.threads) config["threads"] = *overrides.threads;
        if (overrides.out_dir) config["out"] = *overrides.out_dir;

        if (!config.contains("master_seed"))
            throw ConfigInvalid("config: missing required field 'master_seed'");
        ctx.seed = config.at("master_seed").get<std::uint64_t>();
        ctx.trials = config.contains("trials") ? config.at("trials").get<std::size_t>() : 1;
        if (ctx.trials < 1) throw ConfigInvalid("config: trials must be >= 1");
        ctx.threads = config.contains("threads") ? config.at("threads").get<unsigned>() : 1;
        if (ctx.threads < 1) throw ConfigInvalid("config: threads must be >= 1");
        ctx.out = config.contains("out")
                      ? std::filesystem::path(config.at("out").get<std::string>())
                      : std::filesystem::path("runs") / kind;
        config["out"] = ctx.out.string();
        ctx.config = config;
    } catch (const ConfigInvalid& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }

    const std::string started = utc_now();
    int status = 0;
    std::string error;
    try {
        std::filesystem::create_directories(ctx.out);
        if (kind == "info")
            status = run_info(ctx, log);
        else if (kind == "resolve")
            status = run_resolve(ctx, log);
        else if (kind == "wiretap")
            status = run_wiretap(ctx, log);
        else if (kind == "advantage")
            status = run_advantage(ctx, log);
        else if (kind == "lemmas")
            status = run_lemmas(ctx, log);
        else if (kind == "sweep")
            status = run_sweep(ctx, log);
        else
            throw ConfigInvalid("unknown experiment kind '" + kind + "'");
    } catch (const BoundViolated& e) {
        log << "theorem bound violated: " << e.what() << "\n";
        status = 1;
        error = e.what();
    } catch (const ConfigInvalid& e) {
        log << "config error: " << e.what() << "\n";
        status = 2;
        error = e.what();
    } catch (const nlohmann::json::exception& e) {
        log << "config error: " << e.what() << "\n";
        status = 2;
        error = e.what();
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        status = 2;
        error = e.what();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        status = 2;
        error = e.what();
    }
    try {
        write_manifest(ctx, status, started, error);
    } catch (const std::exception& e) {
        log << "manifest write failed: " << e.what() << "\n";
        if (status == 0) status = 2;
    }
    return status;
}

int run_file(const std::string& kind, const std::string& config_path, const Overrides& overrides,
             std::ostream& log) {
    std::ifstream in(config_path);
    if (!in) {
        log << "config error: cannot open " << config_path << "\n";
        return 2;
    }
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }
    return run(kind, std::move(config), overrides, log);
}

} // namespace ccq::experiment
