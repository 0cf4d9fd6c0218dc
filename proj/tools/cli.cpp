#include "cli.hpp"

#include "collatzlab/certificate_json.hpp"
#include "collatzlab/certifier.hpp"
#include "collatzlab/det.hpp"
#include "collatzlab/errors.hpp"
#include "collatzlab/matrix.hpp"
#include "collatzlab/orbits.hpp"
#include "collatzlab/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef COLLATZLAB_VERSION
#define COLLATZLAB_VERSION "0.0.0"
#endif

namespace collatzlab::cli {

using nlohmann::json;

const char* version() { return COLLATZLAB_VERSION; }

namespace {

enum class Format { Text, Json, Csv };

struct Settings {
    std::string format = "text";
    int jobs = 0;
    std::string cache;
    std::string config;
    bool serial = false;
    bool timing = false;

    Index k_min = 0;
    Index k_max = 0;
    std::string engine = "cycle";
    Index cross_check_below = 300;
    double eval_sample = 0.0;
    int eval_points = 10;
    std::uint64_t seed = 0xC011A72;
    bool failures_only = false;

    std::vector<Index> ks;
    Index modulus = 0;
    std::vector<Index> residues;
    Index det_limit = 300;
    std::uint64_t node_budget = kDefaultNodeBudget;
    bool no_trace = false;
    bool tags = false;

    std::string a0;
    std::string m0;
    int max_depth = 32;
    std::int64_t max_modulus = 354294;
    std::string l_min = "1";
    std::uint64_t max_nodes = 1'000'000;
    std::string output;
    int sample = 0;

    Index k = 0;
    bool trace_tags = true;
    std::string kind = "standard";
    bool dense = false;
};

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    return Format::Text;
}

BigInt parse_bigint(const std::string& s, const char* what) {
    BigInt v;
    if (s.empty() || v.set_str(s, 10) != 0) {
        throw CLI::ValidationError(what, "not an integer: " + s);
    }
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += sep;
        s += parts[i];
    }
    return s;
}

std::string command_echo(const std::vector<std::string>& args) { return join(args, " "); }

// --- config file -----------------------------------------------------------

std::optional<std::string> config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    if (const char* env = std::getenv("COLLATZLAB_CONFIG"); env && *env) return std::string(env);
    return std::nullopt;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ValidationError("--config", "unsupported value " + v.dump());
}

CLI::Option* find_long(CLI::App* app, const std::string& name) {
    for (CLI::Option* opt : app->get_options()) {
        for (const std::string& l : opt->get_lnames()) {
            if (l == name) return opt;
        }
    }
    return nullptr;
}

void set_default(CLI::Option* opt, const json& v) {
    if (v.is_array()) {
        std::vector<std::string> parts;
        for (const json& e : v) parts.push_back(scalar_text(e));
        opt->default_val(join(parts, ","));
    } else {
        opt->default_val(scalar_text(v));
    }
}

// Values from the file become option defaults, so command-line flags and
// environment variables still take precedence.
void apply_config(CLI::App& app, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CLI::ValidationError("--config", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ValidationError("--config", "top level must be an object");

    for (const auto& [key, value] : doc.items()) {
        if (CLI::App* sub = app.get_subcommand_no_throw(key); sub && value.is_object()) {
            for (const auto& [skey, svalue] : value.items()) {
                CLI::Option* opt = find_long(sub, skey);
                if (!opt) opt = find_long(&app, skey);
                if (!opt) throw CLI::ValidationError("--config", "unknown key " + key + "." + skey);
                set_default(opt, svalue);
            }
            continue;
        }
        bool found = false;
        if (CLI::Option* opt = find_long(&app, key)) {
            set_default(opt, value);
            found = true;
        }
        for (CLI::App* sub : app.get_subcommands({})) {
            if (CLI::Option* opt = find_long(sub, key)) {
                set_default(opt, value);
                found = true;
            }
        }
        if (!found) throw CLI::ValidationError("--config", "unknown key " + key);
    }
}

// --- results cache ---------------------------------------------------------

class ResultsCache {
public:
    explicit ResultsCache(std::string path) : path_(std::move(path)) {}

    void load(std::ostream& err) {
        if (path_.empty() || !std::filesystem::exists(path_)) return;
        std::ifstream in(path_);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error&) {
            err << "warning: ignoring unreadable cache " << path_ << "\n";
            return;
        }
        if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_object()) return;
        const std::string suffix = std::string("|") + version();
        for (const auto& [key, value] : doc["entries"].items()) {
            if (key.size() > suffix.size() && key.ends_with(suffix)) entries_[key] = value;
        }
    }

    std::optional<VerifyItem> lookup(Index k, const std::string& engine) const {
        auto it = entries_.find(key(k, engine));
        if (it == entries_.end()) return std::nullopt;
        const json& e = *it;
        try {
            std::vector<BigInt> coeffs;
            for (const json& c : e["det"]) coeffs.emplace_back(c.get<std::string>());
            VerifyItem item;
            item.k = k;
            item.det = Poly(std::move(coeffs));
            item.engines = e["engines"].get<std::string>();
            item.eval_checks = e["eval_checks"].get<int>();
            item.pass = item.det == one_minus_x_squared();
            if (!item.pass) return std::nullopt;
            return item;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    // Only passing results are stored; failures are always recomputed.
    void store(const VerifyItem& item, const std::string& engine) {
        if (!item.pass) return;
        json coeffs = json::array();
        for (const BigInt& c : item.det.coeffs()) coeffs.push_back(c.get_str());
        entries_[key(item.k, engine)] = {
            {"det", coeffs}, {"engines", item.engines}, {"eval_checks", item.eval_checks}};
    }

    void save() const {
        if (path_.empty()) return;
        json doc = {{"version", version()}, {"entries", entries_}};
        const std::string tmp = path_ + ".tmp";
        {
            std::ofstream out(tmp);
            out << doc.dump() << "\n";
        }
        std::filesystem::rename(tmp, path_);
    }

private:
    static std::string key(Index k, const std::string& engine) {
        return std::to_string(k) + "|" + engine + "|" + version();
    }

    std::string path_;
    json entries_ = json::object();
};

// --- verify-range ----------------------------------------------------------

int cmd_verify_range(const Settings& s, const std::string& echo, std::ostream& out, std::ostream& err) {
    if (s.k_min < 2 || s.k_max < s.k_min) {
        err << "error: need 2 <= k_min <= k_max (got " << s.k_min << ".." << s.k_max << ")\n";
        return kExitUsage;
    }
    const auto engine = parse_sweep_engine(s.engine);
    if (!engine) {
        err << "error: unknown engine " << s.engine << "\n";
        return kExitUsage;
    }
    SweepOptions opts;
    opts.engine = *engine;
    opts.cross_check_below = s.cross_check_below;
    opts.eval_sample_rate = s.eval_sample;
    opts.eval_points = s.eval_points;
    opts.seed = s.seed;
    opts.jobs = s.jobs;

    const auto start = std::chrono::steady_clock::now();
    ResultsCache cache(s.cache);
    cache.load(err);

    const std::size_t n = static_cast<std::size_t>(s.k_max - s.k_min + 1);
    std::vector<std::optional<VerifyItem>> slots(n);
    std::vector<bool> cached(n, false);
    std::vector<Index> todo;
    for (std::size_t i = 0; i < n; ++i) {
        const Index k = s.k_min + static_cast<Index>(i);
        if (!s.cache.empty()) slots[i] = cache.lookup(k, s.engine);
        if (slots[i]) {
            cached[i] = true;
        } else {
            todo.push_back(k);
        }
    }
    std::vector<VerifyItem> computed =
        s.serial ? verify_list_serial(todo, opts) : verify_list_parallel(todo, opts);
    for (VerifyItem& item : computed) {
        const auto i = static_cast<std::size_t>(item.k - s.k_min);
        cache.store(item, s.engine);
        slots[i] = std::move(item);
    }
    if (!s.cache.empty()) cache.save();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::size_t passed = 0;
    for (const auto& item : slots) passed += item->pass ? 1 : 0;
    const std::size_t failed = n - passed;

    const auto status = [](const VerifyItem& item) { return item.pass ? "PASS" : "FAIL"; };
    switch (parse_format(s.format)) {
    case Format::Json: {
        json items = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            const VerifyItem& item = *slots[i];
            if (s.failures_only && item.pass) continue;
            json j = {{"k", item.k},
                      {"det", item.det.to_string()},
                      {"engines", item.engines},
                      {"engines_agree", item.engines_agree},
                      {"eval_checks", item.eval_checks},
                      {"eval_agree", item.eval_agree},
                      {"cached", static_cast<bool>(cached[i])},
                      {"status", status(item)}};
            if (!item.error.empty()) j["error"] = item.error;
            items.push_back(std::move(j));
        }
        json report = {{"command", echo},
                       {"version", version()},
                       {"items", items},
                       {"totals", {{"items", n}, {"pass", passed}, {"fail", failed}}}};
        if (s.timing) report["seconds"] = seconds;
        out << report.dump(2) << "\n";
        break;
    }
    case Format::Csv:
        out << "k,det,engines,engines_agree,eval_checks,eval_agree,cached,status\n";
        for (std::size_t i = 0; i < n; ++i) {
            const VerifyItem& item = *slots[i];
            if (s.failures_only && item.pass) continue;
            out << item.k << "," << csv_field(item.det.to_string()) << "," << item.engines << ","
                << (item.engines_agree ? "true" : "false") << "," << item.eval_checks << ","
                << (item.eval_agree ? "true" : "false") << "," << (cached[i] ? "true" : "false") << ","
                << status(item) << "\n";
        }
        break;
    case Format::Text:
        out << "verify-range " << s.k_min << ".." << s.k_max << " engine=" << s.engine << "\n";
        for (std::size_t i = 0; i < n; ++i) {
            const VerifyItem& item = *slots[i];
            if (s.failures_only && item.pass) continue;
            out << "k=" << item.k << "  det=" << item.det.to_string() << "  [" << item.engines << "]";
            if (item.eval_checks) out << "  eval=" << item.eval_checks;
            if (cached[i]) out << "  (cached)";
            out << "  " << status(item);
            if (!item.engines_agree) out << "  engines disagree";
            if (!item.eval_agree) out << "  evaluation mismatch";
            if (!item.error.empty()) out << "  error: " << item.error;
            out << "\n";
        }
        out << passed << "/" << n << " PASS";
        if (failed) out << ", " << failed << " FAIL";
        out << "\n";
        if (s.timing) out << "elapsed " << seconds << " s\n";
        break;
    }
    return failed ? kExitInconsistent : kExitOk;
}

// --- mtilde ----------------------------------------------------------------

std::string det_text(const std::optional<Poly>& det) { return det ? det->to_string() : "-"; }

int cmd_mtilde(const Settings& s, const std::string& echo, std::ostream& out, std::ostream& err) {
    std::vector<Index> ks = s.ks;
    if (s.modulus > 0) {
        if (s.residues.empty() || s.k_max < 2) {
            err << "error: --modulus needs --residues and --k-max\n";
            return kExitUsage;
        }
        for (Index k = 2; k <= s.k_max; ++k) {
            for (Index r : s.residues) {
                if (k % s.modulus == r % s.modulus) {
                    ks.push_back(k);
                    break;
                }
            }
        }
    }
    if (ks.empty()) {
        err << "error: no k given\n";
        return kExitUsage;
    }
    for (Index k : ks) {
        if (k < 2 || !m_tilde_applicable(k)) {
            err << "NotApplicable: M~_{k-1} is undefined for k=" << k
                << " (column k of M_k needs two nonzeros and k even)\n";
            return kExitUsage;
        }
    }

    MtildeOptions opts;
    opts.det_limit = s.det_limit;
    opts.eval_points = 0;
    opts.seed = s.seed;
    opts.node_budget = s.node_budget;
    opts.keep_trace = !s.no_trace;
    opts.trace_tags = s.tags;
    opts.jobs = s.jobs;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<MtildeItem> items =
        s.serial ? mtilde_sweep_serial(ks, opts) : mtilde_sweep_parallel(ks, opts);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::map<std::string, std::size_t> counts;
    std::size_t inconsistent = 0;
    std::size_t nontrivial = 0;
    for (const MtildeItem& item : items) {
        ++counts[to_string(item.status)];
        if (!item.consistent) ++inconsistent;
        if (item.status == OrbitStatus::CycleFound && item.k > 2) ++nontrivial;
    }

    switch (parse_format(s.format)) {
    case Format::Json: {
        json arr = json::array();
        for (const MtildeItem& item : items) {
            json j = {{"k", item.k},
                      {"status", to_string(item.status)},
                      {"det", item.det ? json(item.det->to_string()) : json(nullptr)},
                      {"nodes", item.nodes},
                      {"consistent", item.consistent}};
            if (!s.no_trace) j["trace"] = item.trace;
            if (item.cycle) j["cycle"] = *item.cycle;
            if (!item.error.empty()) j["error"] = item.error;
            arr.push_back(std::move(j));
        }
        json totals = {{"items", items.size()}, {"inconsistent", inconsistent}};
        for (const auto& [name, c] : counts) totals[name] = c;
        json report = {{"command", echo}, {"version", version()}, {"items", arr}, {"totals", totals}};
        if (s.timing) report["seconds"] = seconds;
        out << report.dump(2) << "\n";
        break;
    }
    case Format::Csv:
        out << "k,status,det,nodes,consistent\n";
        for (const MtildeItem& item : items) {
            out << item.k << "," << to_string(item.status) << "," << csv_field(det_text(item.det)) << ","
                << item.nodes << "," << (item.consistent ? "true" : "false") << "\n";
        }
        break;
    case Format::Text:
        for (const MtildeItem& item : items) {
            out << "k=" << item.k << "  " << to_string(item.status) << "  det=" << det_text(item.det)
                << "  nodes=" << item.nodes;
            if (!item.consistent) out << "  INCONSISTENT";
            if (!item.error.empty()) out << "  error: " << item.error;
            out << "\n";
            for (const std::string& line : item.trace) out << "  " << line << "\n";
            if (item.cycle) {
                out << "  cycle:";
                for (Index v : *item.cycle) out << " " << v;
                out << "\n";
            }
        }
        if (items.size() > 1) {
            out << items.size() << " k:";
            for (const auto& [name, c] : counts) out << " " << name << "=" << c;
            out << " inconsistent=" << inconsistent << "\n";
        }
        if (s.timing) out << "elapsed " << seconds << " s\n";
        break;
    }
    if (inconsistent) {
        err << "error: orbit decision and determinant disagree\n";
        return kExitInconsistent;
    }
    if (nontrivial) {
        err << "error: cycle through k found\n";
        return kExitInconsistent;
    }
    return kExitOk;
}

// --- certify ---------------------------------------------------------------

int cmd_certify(const Settings& s, const std::string& echo, std::ostream& out, std::ostream& err) {
    const BigInt a0 = parse_bigint(s.a0, "a");
    const BigInt m0 = parse_bigint(s.m0, "m");
    CertifierConfig cfg;
    cfg.max_depth = s.max_depth;
    cfg.max_modulus = s.max_modulus;
    cfg.l_min = parse_bigint(s.l_min, "--l-min");
    cfg.max_nodes = s.max_nodes;

    const auto start = std::chrono::steady_clock::now();
    const Certificate cert = certify_family(a0, m0, cfg);

    const std::string path =
        s.output.empty() ? "certificate-" + a0.get_str() + "-" + m0.get_str() + ".json" : s.output;
    if (path != "-") {
        std::ofstream file(path);
        if (!file) {
            err << "error: cannot write " << path << "\n";
            return kExitUsage;
        }
        file << canonical_json(cert);
    }

    // Concrete members of certified classes must all be ZeroCertified.
    std::size_t sampled = 0;
    std::vector<std::string> counterexamples;
    if (s.sample > 0) {
        MtildeOptions mopts;
        mopts.det_limit = s.det_limit;
        mopts.node_budget = s.node_budget;
        mopts.jobs = s.jobs;
        std::vector<Index> ks;
        for (const ClassSummary& cls : cert.summary) {
            if (cls.status != ClassStatus::Certified) continue;
            for (Index k : class_members(cert, cls, static_cast<std::size_t>(s.sample))) ks.push_back(k);
        }
        const auto items = s.serial ? mtilde_sweep_serial(ks, mopts) : mtilde_sweep_parallel(ks, mopts);
        sampled = items.size();
        for (const MtildeItem& item : items) {
            if (item.status != OrbitStatus::ZeroCertified || !item.consistent) {
                counterexamples.push_back(std::to_string(item.k));
            }
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::map<std::string, std::size_t> counts;
    for (const ClassSummary& cls : cert.summary) ++counts[to_string(cls.status)];
    const std::string family = "k = " + a0.get_str() + " + " + m0.get_str() + "l";

    switch (parse_format(s.format)) {
    case Format::Json: {
        json classes = json::array();
        for (const ClassSummary& cls : cert.summary) {
            classes.push_back({{"class", cls.description(cfg.l_min)},
                               {"k", to_json(cls.k)},
                               {"status", to_string(cls.status)},
                               {"reason", cls.reason}});
        }
        json report = {{"command", echo},
                       {"version", version()},
                       {"family", family},
                       {"certificate", path},
                       {"all_certified", cert.fully_certified()},
                       {"items", classes},
                       {"totals", counts},
                       {"sampled", sampled},
                       {"counterexamples", counterexamples}};
        if (s.timing) report["seconds"] = seconds;
        out << report.dump(2) << "\n";
        break;
    }
    case Format::Csv:
        out << "class,k,status,reason\n";
        for (const ClassSummary& cls : cert.summary) {
            out << csv_field(cls.description(cfg.l_min)) << "," << csv_field(cls.k.to_string()) << ","
                << to_string(cls.status) << "," << csv_field(cls.reason) << "\n";
        }
        break;
    case Format::Text:
        out << "certify " << family << " (l >= " << cfg.l_min.get_str() << "), max_depth=" << cfg.max_depth
            << ", max_modulus=" << cfg.max_modulus << "\n";
        if (cert.fully_certified()) {
            out << "all l certified\n";
        } else {
            for (const ClassSummary& cls : cert.summary) {
                out << to_string(cls.status) << "  " << cls.description(cfg.l_min) << "  (k = "
                    << cls.k.to_string() << ")";
                if (cls.status != ClassStatus::Certified && !cls.reason.empty()) out << "  " << cls.reason;
                out << "\n";
            }
        }
        out << "classes:";
        for (const auto& [name, c] : counts) out << " " << name << "=" << c;
        out << "\n";
        if (s.sample > 0) out << "sampled " << sampled << " members, " << counterexamples.size() << " counterexamples\n";
        if (path != "-") out << "certificate written to " << path << "\n";
        if (s.timing) out << "elapsed " << seconds << " s\n";
        break;
    }
    if (path == "-") out << canonical_json(cert);

    if (!counterexamples.empty()) {
        err << "error: certified class member fails the concrete check: k=" << join(counterexamples, ", ") << "\n";
        return kExitInconsistent;
    }
    if (cert.has_cycle_candidate()) {
        err << "error: cycle candidate found\n";
        return kExitInconsistent;
    }
    return kExitOk;
}

// --- orbit-trace -----------------------------------------------------------

int cmd_orbit_trace(const Settings& s, const std::string& echo, std::ostream& out, std::ostream&) {
    const auto cyc = cycles(s.k);
    std::optional<OrbitDecision> d;
    if (m_tilde_applicable(s.k)) d = decide_mtilde_zero(s.k, s.node_budget);

    switch (parse_format(s.format)) {
    case Format::Json: {
        json j = {{"command", echo}, {"version", version()}, {"k", s.k}, {"cycles", cyc}};
        if (d) {
            json steps = json::array();
            for (const TraceStep& t : d->trace) {
                steps.push_back({{"value", t.value}, {"via", to_string(t.via)}, {"depth", t.depth}});
            }
            j["mtilde"] = {{"status", to_string(d->status)},
                           {"nodes", d->nodes},
                           {"paths", render_trace(*d, s.trace_tags)},
                           {"steps", steps}};
            if (d->cycle) j["mtilde"]["cycle"] = *d->cycle;
        } else {
            j["mtilde"] = nullptr;
        }
        out << j.dump(2) << "\n";
        break;
    }
    case Format::Csv:
        out << "value,via,depth\n";
        if (d) {
            for (const TraceStep& t : d->trace) out << t.value << "," << to_string(t.via) << "," << t.depth << "\n";
        }
        break;
    case Format::Text:
        out << "k=" << s.k << "\ncycles:";
        for (const auto& c : cyc) {
            out << " (";
            for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << c[i];
            out << ")";
        }
        out << "\n";
        if (d) {
            out << "mtilde: " << to_string(d->status) << " (nodes=" << d->nodes << ")\n";
            for (const std::string& line : render_trace(*d, s.trace_tags)) out << "  " << line << "\n";
        } else {
            out << "mtilde: not applicable\n";
        }
        break;
    }
    return kExitOk;
}

// --- dump-matrix -----------------------------------------------------------

CollatzMatrix build_kind(Index k, const std::string& kind) {
    if (kind == "prime") return build_m_prime(k);
    if (kind == "tilde") return build_m_tilde(k);
    return build_collatz(k);
}

int cmd_dump_matrix(const Settings& s, const std::string& echo, std::ostream& out, std::ostream&) {
    const CollatzMatrix m = build_kind(s.k, s.kind);
    switch (parse_format(s.format)) {
    case Format::Json: {
        json rows = json::array();
        for (Index i = 1; i <= m.size(); ++i) {
            const MatrixRow& r = m.row(i);
            rows.push_back({{"row", i},
                            {"one", r.one_column ? json(*r.one_column) : json(nullptr)},
                            {"x", r.x_column ? json(*r.x_column) : json(nullptr)}});
        }
        out << json{{"command", echo}, {"kind", to_string(m.kind())}, {"k", m.origin_k()}, {"size", m.size()}, {"rows", rows}}
                   .dump(2)
            << "\n";
        break;
    }
    case Format::Csv:
        out << "row,one,x\n";
        for (Index i = 1; i <= m.size(); ++i) {
            const MatrixRow& r = m.row(i);
            out << i << "," << (r.one_column ? std::to_string(*r.one_column) : "") << ","
                << (r.x_column ? std::to_string(*r.x_column) : "") << "\n";
        }
        break;
    case Format::Text:
        if (s.dense) {
            for (Index i = 1; i <= m.size(); ++i) {
                for (Index j = 1; j <= m.size(); ++j) {
                    const Cell c = m.at(i, j);
                    out << (j > 1 ? " " : "") << (c == Cell::One ? '1' : c == Cell::X ? 'x' : '0');
                }
                out << "\n";
            }
        } else {
            out << m.dump();
        }
        break;
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Exact determinant and inverse-orbit checks for Collatz matrices", "collatzlab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", version());

    app.add_option("--format", s.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->envname("COLLATZLAB_FORMAT");
    app.add_option("--jobs", s.jobs, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber)
        ->envname("COLLATZLAB_JOBS");
    app.add_option("--cache", s.cache, "Results cache file (verify-range)")->envname("COLLATZLAB_CACHE");
    app.add_option("--config", s.config, "JSON config file")->envname("COLLATZLAB_CONFIG");
    app.add_flag("--serial", s.serial, "Use the single-threaded reference kernels")->envname("COLLATZLAB_SERIAL");
    app.add_flag("--timing", s.timing, "Report elapsed time")->envname("COLLATZLAB_TIMING");
    app.add_option("--seed", s.seed, "Seed for evaluation points")->envname("COLLATZLAB_SEED");
    app.add_option("--node-budget", s.node_budget, "Node budget of the inverse-orbit search")
        ->envname("COLLATZLAB_NODE_BUDGET");
    app.add_option("--det-limit", s.det_limit, "Largest k whose M~ determinant is computed exactly")
        ->envname("COLLATZLAB_DET_LIMIT");

    auto* verify = app.add_subcommand("verify-range", "Check det M_k = 1 - x^2 for k_min <= k <= k_max");
    verify->add_option("k_min", s.k_min)->required();
    verify->add_option("k_max", s.k_max)->required();
    verify->add_option("--engine", s.engine, "Determinant engine")
        ->check(CLI::IsMember({"bruteforce", "elim", "cycle", "both"}))
        ->envname("COLLATZLAB_ENGINE");
    verify->add_option("--cross-check-below", s.cross_check_below, "With --engine cycle, also eliminate for k <= N")
        ->envname("COLLATZLAB_CROSS_CHECK_BELOW");
    verify->add_option("--eval-sample", s.eval_sample, "Fraction of k with integer-evaluation checks")
        ->check(CLI::Range(0.0, 1.0))
        ->envname("COLLATZLAB_EVAL_SAMPLE");
    verify->add_option("--eval-points", s.eval_points, "Evaluation points per sampled k")
        ->check(CLI::PositiveNumber)
        ->envname("COLLATZLAB_EVAL_POINTS");
    verify->add_flag("--failures-only", s.failures_only, "List failing k only")->envname("COLLATZLAB_FAILURES_ONLY");

    auto* mtilde = app.add_subcommand("mtilde", "Decide det M~_{k-1} = 0");
    mtilde->add_option("k", s.ks, "One or more k");
    mtilde->add_option("--modulus", s.modulus, "Sweep k <= --k-max in the given residue classes");
    mtilde->add_option("--residues", s.residues)->delimiter(',');
    mtilde->add_option("--k-max", s.k_max);
    mtilde->add_flag("--no-trace", s.no_trace, "Omit search paths");
    mtilde->add_flag("--tags", s.tags, "Label each step [tri] or [double]");

    auto* certify = app.add_subcommand("certify", "Certify the family k = a + m*l symbolically");
    certify->add_option("a", s.a0)->required();
    certify->add_option("m", s.m0)->required();
    certify->add_option("--max-depth", s.max_depth, "Largest number of residue refinements")
        ->check(CLI::NonNegativeNumber)
        ->envname("COLLATZLAB_MAX_DEPTH");
    certify->add_option("--max-modulus", s.max_modulus, "Largest modulus of a refined class")
        ->check(CLI::PositiveNumber)
        ->envname("COLLATZLAB_MAX_MODULUS");
    certify->add_option("--max-nodes", s.max_nodes, "Node budget of the symbolic search")
        ->envname("COLLATZLAB_MAX_NODES");
    certify->add_option("--l-min", s.l_min, "Smallest family parameter")->envname("COLLATZLAB_L_MIN");
    certify->add_option("--output,-o", s.output, "Certificate path ('-' for stdout)");
    certify->add_option("--sample", s.sample, "Concrete members checked per certified class")
        ->check(CLI::NonNegativeNumber)
        ->envname("COLLATZLAB_SAMPLE");

    auto* trace = app.add_subcommand("orbit-trace", "Cycles of the truncated map and the M~ search tree");
    trace->add_option("k", s.k)->required()->check(CLI::Range(Index{2}, std::numeric_limits<Index>::max()));
    trace->add_flag("--tags,!--no-tags", s.trace_tags, "Label each step (default on)");

    auto* dump = app.add_subcommand("dump-matrix", "Print M_k, M'_{k-1} or M~_{k-1}");
    dump->add_option("k", s.k)->required()->check(CLI::Range(Index{2}, std::numeric_limits<Index>::max()));
    dump->add_option("--kind", s.kind)->check(CLI::IsMember({"standard", "prime", "tilde"}));
    dump->add_flag("--dense", s.dense, "Print the full grid");

    std::vector<std::string> argv_store{"collatzlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : argv_store) argv.push_back(a.c_str());

    try {
        if (auto path = config_path(args)) apply_config(app, *path);
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string echo = command_echo(args);
    try {
        if (verify->parsed()) return cmd_verify_range(s, echo, out, err);
        if (mtilde->parsed()) return cmd_mtilde(s, echo, out, err);
        if (certify->parsed()) return cmd_certify(s, echo, out, err);
        if (trace->parsed()) return cmd_orbit_trace(s, echo, out, err);
        if (dump->parsed()) return cmd_dump_matrix(s, echo, out, err);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace collatzlab::cli
