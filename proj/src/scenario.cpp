#include "etamu/scenario.hpp"

#include "etamu/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace etamu {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double from_db(double db) { return std::pow(10.0, db / 10.0); }

const std::map<std::string, SweepVariable> kVariables{
    {"common-gbar-dB", SweepVariable::common_gbar_db},
    {"eta", SweepVariable::eta},
    {"p", SweepVariable::p},
    {"mu", SweepVariable::mu},
    {"snr-dB", SweepVariable::snr_db},
};

const std::map<std::string, Metric> kMetrics{
    {"pdf", Metric::pdf}, {"cdf", Metric::cdf},           {"outage", Metric::outage},
    {"ser", Metric::ser}, {"capacity", Metric::capacity},
};

const char* column_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::common_gbar_db: return "common_gbar_db";
        case SweepVariable::eta: return "eta";
        case SweepVariable::p: return "p";
        case SweepVariable::mu: return "mu";
        case SweepVariable::snr_db: return "snr_db";
    }
    return "?";
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::pdf: return "pdf";
        case Metric::cdf: return "cdf";
        case Metric::outage: return "outage";
        case Metric::ser: return "ser";
        case Metric::capacity: return "capacity";
    }
    return "?";
}

// Walks the document, recording every violation instead of stopping at the first.
class Reader {
public:
    explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

    void error(const std::string& field, const std::string& msg) {
        diags_.push_back({Diagnostic::Level::error, field, msg});
    }
    void notice(const std::string& field, const std::string& msg) {
        diags_.push_back({Diagnostic::Level::notice, field, msg});
    }

    void allow_keys(const json& obj, const std::string& path, std::set<std::string> keys) {
        for (const auto& [k, _] : obj.items())
            if (!keys.count(k)) error(join(path, k), "unknown field");
    }

    const json* object(const json& parent, const std::string& path, const std::string& key,
                       bool required) {
        if (!parent.contains(key)) {
            if (required) error(join(path, key), "missing required object");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            error(join(path, key), "must be an object");
            return nullptr;
        }
        return &v;
    }

    std::optional<double> number(const json& obj, const std::string& path, const std::string& key,
                                 bool required) {
        if (!obj.contains(key)) {
            if (required) error(join(path, key), "missing required number");
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            error(join(path, key), "must be a finite number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<double> positive(const json& obj, const std::string& path, const std::string& key,
                                   bool required) {
        auto v = number(obj, path, key, required);
        if (v && !(*v > 0.0)) {
            error(join(path, key), "must be positive (got " + fmt(*v) + ")");
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> open_unit(const json& obj, const std::string& path,
                                    const std::string& key) {
        auto v = number(obj, path, key, true);
        if (v && !(std::abs(*v) < 1.0)) {
            error(join(path, key), "must lie in (-1, 1) (got " + fmt(*v) + ")");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const json& obj, const std::string& path,
                                     const std::string& key, long long min_value) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < min_value) {
            error(join(path, key), "must be an integer >= " + std::to_string(min_value));
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path,
                                      const std::string& key, bool required) {
        if (!obj.contains(key)) {
            if (required) error(join(path, key), "missing required string");
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_string()) {
            error(join(path, key), "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    // Exactly one of `key` (linear) and `key_db`.
    std::optional<double> linear_or_db(const json& obj, const std::string& path,
                                       const std::string& key, bool required) {
        const bool lin = obj.contains(key), db = obj.contains(key + "_db");
        if (lin && db) {
            error(join(path, key), "give either " + key + " or " + key + "_db, not both");
            return std::nullopt;
        }
        if (db) {
            auto v = number(obj, path, key + "_db", true);
            return v ? std::optional<double>(from_db(*v)) : std::nullopt;
        }
        if (lin) return positive(obj, path, key, true);
        if (required) error(join(path, key), "missing (give " + key + " or " + key + "_db)");
        return std::nullopt;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

private:
    std::vector<Diagnostic>& diags_;
};

void read_branches(Reader& rd, const json& doc, Scenario& sc) {
    if (!doc.contains("branches") || !doc.at("branches").is_array() || doc.at("branches").empty()) {
        rd.error("branches", "must be a nonempty array of branch objects");
        return;
    }
    const json& arr = doc.at("branches");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = Reader::index("branches", i);
        const json& b = arr[i];
        if (!b.is_object()) {
            rd.error(path, "must be an object");
            continue;
        }
        std::string format = "I";
        if (auto f = rd.string(b, path, "format", false)) {
            format = *f;
        } else if (!b.contains("format")) {
            rd.notice(Reader::join(path, "format"), "not given; Format I assumed");
        }
        const auto mu = rd.positive(b, path, "mu", true);
        const auto gbar = rd.linear_or_db(b, path, "gbar", true);
        const long long copies = rd.integer(b, path, "copies", 1).value_or(1);
        std::optional<BranchParams> params;
        if (format == "I") {
            rd.allow_keys(b, path, {"format", "mu", "eta", "p", "gbar", "gbar_db", "copies"});
            const auto eta = rd.positive(b, path, "eta", true);
            const auto p = rd.positive(b, path, "p", true);
            if (mu && eta && p && gbar) params.emplace(*mu, *eta, *p, *gbar);
        } else if (format == "II") {
            rd.allow_keys(b, path, {"format", "mu", "eta2", "p2", "gbar", "gbar_db", "copies"});
            const auto eta2 = rd.open_unit(b, path, "eta2");
            const auto p2 = rd.open_unit(b, path, "p2");
            if (mu && eta2 && p2 && gbar)
                params = format2_to_format1(FormatIIParams(*mu, *eta2, *p2, *gbar));
        } else {
            rd.error(Reader::join(path, "format"), "must be \"I\" or \"II\" (got \"" + format + "\")");
        }
        if (params)
            for (long long k = 0; k < copies; ++k) sc.branches.push_back(*params);
    }
}

void read_sweep(Reader& rd, const json& doc, Scenario& sc) {
    if (!doc.contains("sweep") || !doc.at("sweep").is_array() || doc.at("sweep").empty() ||
        doc.at("sweep").size() > 3) {
        rd.error("sweep", "must be an array of one to three axes");
        return;
    }
    const json& arr = doc.at("sweep");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = Reader::index("sweep", i);
        const json& ax = arr[i];
        if (!ax.is_object()) {
            rd.error(path, "must be an object");
            continue;
        }
        rd.allow_keys(ax, path, {"variable", "start", "stop", "points", "values"});
        SweepAxis axis;
        const auto var = rd.string(ax, path, "variable", true);
        bool ok = true;
        if (var) {
            const auto it = kVariables.find(*var);
            if (it == kVariables.end()) {
                rd.error(Reader::join(path, "variable"),
                         "unknown variable \"" + *var + "\" (common-gbar-dB, eta, p, mu, snr-dB)");
                ok = false;
            } else if (!seen.insert(*var).second) {
                rd.error(Reader::join(path, "variable"), "\"" + *var + "\" is swept twice");
                ok = false;
            } else {
                axis.variable = it->second;
            }
        } else {
            ok = false;
        }

        if (ax.contains("values")) {
            if (ax.contains("start") || ax.contains("stop") || ax.contains("points"))
                rd.error(path, "give either values or start/stop/points, not both");
            const json& vals = ax.at("values");
            if (!vals.is_array() || vals.size() < 2) {
                rd.error(Reader::join(path, "values"), "must be an array of at least 2 numbers");
                ok = false;
            } else {
                for (std::size_t k = 0; k < vals.size(); ++k) {
                    if (!vals[k].is_number()) {
                        rd.error(Reader::index(Reader::join(path, "values"), k), "must be a number");
                        ok = false;
                    } else {
                        axis.values.push_back(vals[k].get<double>());
                    }
                }
            }
        } else {
            const auto start = rd.number(ax, path, "start", true);
            const auto stop = rd.number(ax, path, "stop", true);
            const auto points = rd.integer(ax, path, "points", 2);
            if (!ax.contains("points")) rd.error(Reader::join(path, "points"), "missing required integer");
            if (start && stop && points) {
                for (long long k = 0; k < *points; ++k)
                    axis.values.push_back(*start + (*stop - *start) * double(k) / double(*points - 1));
            } else {
                ok = false;
            }
        }
        const bool needs_positive = axis.variable == SweepVariable::eta ||
                                    axis.variable == SweepVariable::p ||
                                    axis.variable == SweepVariable::mu;
        if (ok && needs_positive)
            for (double v : axis.values)
                if (!(v > 0.0)) {
                    rd.error(path, std::string(column_name(axis.variable)) +
                                       " values must be positive (got " + Reader::fmt(v) + ")");
                    ok = false;
                    break;
                }
        if (ok) sc.sweep.push_back(std::move(axis));
    }
}

void read_metrics(Reader& rd, const json& doc, Scenario& sc) {
    if (!doc.contains("metrics") || !doc.at("metrics").is_array() || doc.at("metrics").empty()) {
        rd.error("metrics", "must be a nonempty array (pdf, cdf, outage, ser, capacity)");
        return;
    }
    const json& arr = doc.at("metrics");
    std::set<Metric> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = Reader::index("metrics", i);
        const auto it = arr[i].is_string() ? kMetrics.find(arr[i].get<std::string>()) : kMetrics.end();
        if (it == kMetrics.end()) {
            rd.error(path, "unknown metric " + arr[i].dump());
        } else if (seen.insert(it->second).second) {
            sc.metrics.push_back(it->second);
        }
    }
}

void read_options(Reader& rd, const json& doc, Scenario& sc) {
    const json* o = rd.object(doc, "", "options", false);
    if (!o) return;
    rd.allow_keys(*o, "options",
                  {"threshold", "threshold_db", "snr", "snr_db", "modulation", "capacity_fit", "route"});
    if (auto t = rd.linear_or_db(*o, "options", "threshold", false)) sc.threshold = *t;
    if (auto s = rd.linear_or_db(*o, "options", "snr", false)) sc.snr = *s;
    if (auto m = rd.string(*o, "options", "modulation", false)) {
        try {
            sc.modulation = parse_modulation(*m);
        } catch (const DomainError& e) {
            rd.error("options.modulation", e.what());
        }
    }
    if (auto r = rd.string(*o, "options", "route", false)) {
        if (*r == "auto")
            sc.route = EvalRoute::automatic;
        else if (*r == "phi2")
            sc.route = EvalRoute::phi2_series;
        else if (*r == "bromwich")
            sc.route = EvalRoute::bromwich;
        else
            rd.error("options.route", "must be auto, phi2 or bromwich");
    }
    if (const json* f = rd.object(*o, "options", "capacity_fit", false)) {
        rd.allow_keys(*f, "options.capacity_fit", {"deltas", "sigmas"});
        for (const char* key : {"deltas", "sigmas"}) {
            const std::string path = std::string("options.capacity_fit.") + key;
            if (!f->contains(key)) {
                rd.error(path, "missing (4 numbers)");
                continue;
            }
            const json& a = f->at(key);
            if (!a.is_array() || a.size() != 4 ||
                !std::all_of(a.begin(), a.end(), [](const json& v) { return v.is_number(); })) {
                rd.error(path, "must be an array of 4 numbers");
                continue;
            }
            auto& dst = std::string(key) == "deltas" ? sc.fit.deltas : sc.fit.sigmas;
            for (std::size_t k = 0; k < 4; ++k) dst[k] = a[k].get<double>();
        }
        try {
            sc.fit.validate();
        } catch (const DomainError& e) {
            rd.error("options.capacity_fit", e.what());
        }
    }
}

void read_controls(Reader& rd, const json& doc, Scenario& sc) {
    const json* c = rd.object(doc, "", "controls", false);
    if (!c) return;
    rd.allow_keys(*c, "controls",
                  {"contour_nodes", "contour_max_nodes", "contour_tolerance", "series_max_degree",
                   "series_rel_tol", "auto_argument_limit", "auto_max_branches"});
    auto& ct = sc.eval.contour;
    if (auto n = rd.integer(*c, "controls", "contour_nodes", 8)) {
        if (*n % 2) rd.error("controls.contour_nodes", "must be even");
        ct.node_count = static_cast<int>(*n);
        ct.max_node_count = std::max(ct.max_node_count, ct.node_count);
    }
    if (auto n = rd.integer(*c, "controls", "contour_max_nodes", 8)) {
        if (*n < ct.node_count) rd.error("controls.contour_max_nodes", "must be >= contour_nodes");
        ct.max_node_count = static_cast<int>(*n);
    }
    if (auto t = rd.positive(*c, "controls", "contour_tolerance", false)) ct.tolerance = *t;
    if (auto n = rd.integer(*c, "controls", "series_max_degree", 1))
        sc.eval.series.max_total_degree = static_cast<int>(*n);
    if (auto t = rd.positive(*c, "controls", "series_rel_tol", false)) sc.eval.series.rel_tol = *t;
    if (auto a = rd.positive(*c, "controls", "auto_argument_limit", false))
        sc.eval.auto_argument_limit = *a;
    if (auto n = rd.integer(*c, "controls", "auto_max_branches", 0))
        sc.eval.auto_max_branches = static_cast<std::size_t>(*n);
}

void read_sim(Reader& rd, const json& doc, Scenario& sc) {
    const json* s = rd.object(doc, "", "sim", false);
    if (!s) return;
    rd.allow_keys(*s, "sim", {"enabled", "seed", "replicas", "stream_count"});
    if (s->contains("enabled")) {
        if (!s->at("enabled").is_boolean())
            rd.error("sim.enabled", "must be true or false");
        else
            sc.simulate = s->at("enabled").get<bool>();
    } else {
        sc.simulate = true;
    }
    if (s->contains("seed")) {
        if (!s->at("seed").is_number_unsigned())
            rd.error("sim.seed", "must be a nonnegative integer");
        else
            sc.sim.seed = s->at("seed").get<std::uint64_t>();
    } else {
        rd.notice("sim.seed", "not given; default seed " + std::to_string(sc.sim.seed) + " applied");
    }
    if (auto r = rd.integer(*s, "sim", "replicas", 1)) sc.sim.replicas = static_cast<std::size_t>(*r);
    if (auto w = rd.integer(*s, "sim", "stream_count", 1))
        sc.sim.stream_count = static_cast<unsigned>(*w);
}

void read_output(Reader& rd, const json& doc, Scenario& sc) {
    sc.output_prefix = sc.name;
    const json* o = rd.object(doc, "", "output", false);
    if (!o) return;
    rd.allow_keys(*o, "output", {"directory", "prefix"});
    if (auto d = rd.string(*o, "output", "directory", false)) sc.output_directory = *d;
    if (auto p = rd.string(*o, "output", "prefix", false)) {
        if (p->empty() || p->find('/') != std::string::npos)
            rd.error("output.prefix", "must be a nonempty file name stem");
        else
            sc.output_prefix = *p;
    }
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.level == Diagnostic::Level::error; });
}

std::string cell(double v) { return Reader::fmt(v); }

std::string na_reason(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const AccuracyError&) {
        return "NA(accuracy)";
    } catch (const ConvergenceError&) {
        return "NA(convergence)";
    } catch (const OverflowError&) {
        return "NA(overflow)";
    } catch (const DomainError&) {
        return "NA(domain)";
    } catch (...) {
        return "NA(error)";
    }
}

std::string exception_text(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& x) {
        return x.what();
    } catch (...) {
        return "unknown failure";
    }
}

struct Cell {
    MrcChannel channel;
    double threshold;
    double snr;
};

Cell make_cell(const Scenario& sc, const std::vector<double>& point) {
    std::vector<BranchParams> b = sc.branches;
    double threshold = sc.threshold, snr = sc.snr;
    for (std::size_t a = 0; a < sc.sweep.size(); ++a) {
        const double x = point[a];
        for (auto& br : b) {
            switch (sc.sweep[a].variable) {
                case SweepVariable::common_gbar_db: br = br.with_gbar(from_db(x)); break;
                case SweepVariable::eta: br = BranchParams(br.mu(), x, br.p(), br.gbar()); break;
                case SweepVariable::p: br = BranchParams(br.mu(), br.eta(), x, br.gbar()); break;
                case SweepVariable::mu: br = BranchParams(x, br.eta(), br.p(), br.gbar()); break;
                case SweepVariable::snr_db: break;
            }
        }
        if (sc.sweep[a].variable == SweepVariable::snr_db) threshold = snr = from_db(x);
    }
    return {MrcChannel(std::move(b)), threshold, snr};
}

std::vector<std::string> header(const Scenario& sc, Metric m) {
    std::vector<std::string> h;
    for (const auto& ax : sc.sweep) h.emplace_back(column_name(ax.variable));
    h.emplace_back("analytic");
    if (m == Metric::cdf || m == Metric::outage || m == Metric::ser) h.emplace_back("asymptotic");
    if (m == Metric::capacity) {
        h.emplace_back("exact_log_numint");
        h.emplace_back("eps_fit");
    }
    if (sc.simulate && m != Metric::pdf) {
        h.emplace_back("mc");
        h.emplace_back("mc_half_width");
    }
    return h;
}

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

ordered_json branch_i(double mu, double eta, double p, double gbar_db, int copies = 1) {
    ordered_json b{{"format", "I"}, {"mu", mu}, {"eta", eta}, {"p", p}, {"gbar_db", gbar_db}};
    if (copies > 1) b["copies"] = copies;
    return b;
}

ordered_json axis_range(const char* var, double start, double stop, int points) {
    return {{"variable", var}, {"start", start}, {"stop", stop}, {"points", points}};
}

ordered_json axis_values(const char* var, std::vector<double> values) {
    return {{"variable", var}, {"values", values}};
}

ordered_json sim_block(bool enabled, std::size_t replicas) {
    return {{"enabled", enabled}, {"seed", 20240521}, {"replicas", replicas}, {"stream_count", 1}};
}

}  // namespace

std::string to_string(const Diagnostic& d) {
    return std::string(d.level == Diagnostic::Level::error ? "error" : "notice") + ": " +
           (d.field.empty() ? "" : d.field + ": ") + d.message;
}

std::optional<Scenario> parse_scenario(const std::string& json_text, std::vector<Diagnostic>& diags) {
    Reader rd(diags);
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        rd.error("", std::string("not valid JSON: ") + e.what());
        return std::nullopt;
    }
    if (!doc.is_object()) {
        rd.error("", "the scenario must be a JSON object");
        return std::nullopt;
    }
    rd.allow_keys(doc, "",
                  {"name", "branches", "sweep", "metrics", "options", "controls", "sim", "output"});
    Scenario sc;
    sc.name = rd.string(doc, "", "name", false).value_or("scenario");
    read_branches(rd, doc, sc);
    read_sweep(rd, doc, sc);
    read_metrics(rd, doc, sc);
    read_options(rd, doc, sc);
    read_controls(rd, doc, sc);
    read_sim(rd, doc, sc);
    read_output(rd, doc, sc);
    if (has_errors(diags)) return std::nullopt;
    return sc;
}

std::optional<Scenario> load_scenario(const std::string& path, std::vector<Diagnostic>& diags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diags.push_back({Diagnostic::Level::error, "", "cannot read scenario file " + path});
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), diags);
}

std::vector<Diagnostic> validate_scenario(const std::string& path) {
    std::vector<Diagnostic> diags;
    load_scenario(path, diags);
    return diags;
}

RunReport run_scenario(const Scenario& sc) {
    RunReport rep;
    std::vector<std::size_t> shape;
    std::size_t cells = 1;
    for (const auto& ax : sc.sweep) {
        shape.push_back(ax.values.size());
        cells *= ax.values.size();
    }
    const double eps_fit = std::find(sc.metrics.begin(), sc.metrics.end(), Metric::capacity) !=
                                   sc.metrics.end()
                               ? fit_error_bound(sc.fit)
                               : 0.0;

    std::map<Metric, std::vector<std::vector<std::string>>> tables;
    for (Metric m : sc.metrics) tables[m].push_back(header(sc, m));

    std::vector<double> point(sc.sweep.size());
    for (std::size_t idx = 0; idx < cells; ++idx) {
        std::size_t rest = idx;
        for (std::size_t a = sc.sweep.size(); a-- > 0;) {
            point[a] = sc.sweep[a].values[rest % shape[a]];
            rest /= shape[a];
        }
        const Cell c = make_cell(sc, point);
        std::vector<double> draws;
        if (sc.simulate && std::any_of(sc.metrics.begin(), sc.metrics.end(),
                                       [](Metric m) { return m != Metric::pdf && m != Metric::ser; }))
            draws = sample_sums(c.channel, sc.sim);

        for (Metric m : sc.metrics) {
            std::vector<std::string> row;
            for (double x : point) row.push_back(cell(x));
            auto put = [&](const char* what, auto&& f) {
                try {
                    row.push_back(cell(f()));
                } catch (...) {
                    const auto e = std::current_exception();
                    row.push_back(na_reason(e));
                    ++rep.na_cells;
                    rep.diagnostics.push_back({Diagnostic::Level::notice,
                                               std::string(metric_name(m)) + "[" +
                                                   std::to_string(idx) + "]." + what,
                                               exception_text(e)});
                }
            };
            switch (m) {
                case Metric::pdf:
                    put("analytic", [&] { return sum_pdf(c.channel, c.snr, sc.route, sc.eval); });
                    break;
                case Metric::cdf:
                case Metric::outage: {
                    const double at = m == Metric::cdf ? c.snr : c.threshold;
                    put("analytic", [&] { return sum_cdf(c.channel, at, sc.route, sc.eval); });
                    put("asymptotic", [&] { return asymptotic_cdf(c.channel, at); });
                    if (sc.simulate) {
                        const McEstimate e = estimate_outage(draws, at);
                        row.push_back(cell(e.value));
                        row.push_back(cell(e.half_width));
                    }
                    break;
                }
                case Metric::ser:
                    put("analytic", [&] { return ser_fd(c.channel, sc.modulation); });
                    put("asymptotic", [&] { return asymptotic_ser(c.channel, sc.modulation); });
                    if (sc.simulate) {
                        const McEstimate e = estimate_ser(c.channel, sc.modulation, sc.sim);
                        row.push_back(cell(e.value));
                        row.push_back(cell(e.half_width));
                    }
                    break;
                case Metric::capacity:
                    put("analytic", [&] { return capacity_fd(c.channel, sc.fit); });
                    put("exact_log_numint", [&] { return capacity_numint(c.channel, true, sc.fit); });
                    row.push_back(cell(eps_fit));
                    if (sc.simulate) {
                        const McEstimate e = estimate_capacity(draws, false, sc.fit);
                        row.push_back(cell(e.value));
                        row.push_back(cell(e.half_width));
                    }
                    break;
            }
            tables[m].push_back(std::move(row));
        }
    }

    std::filesystem::create_directories(sc.output_directory);
    for (Metric m : sc.metrics) {
        const auto path = (std::filesystem::path(sc.output_directory) /
                           (sc.output_prefix + "_" + metric_name(m) + ".csv"))
                              .string();
        write_csv(path, tables[m]);
        rep.files.push_back(path);
    }
    rep.exit_code = rep.na_cells > 0 ? 2 : 0;
    return rep;
}

RunReport run_scenario(const std::string& path, const std::optional<std::string>& output_directory) {
    RunReport rep;
    auto sc = load_scenario(path, rep.diagnostics);
    if (!sc) {
        rep.exit_code = 1;
        return rep;
    }
    if (output_directory) sc->output_directory = *output_directory;
    RunReport run = run_scenario(*sc);
    run.diagnostics.insert(run.diagnostics.begin(), rep.diagnostics.begin(), rep.diagnostics.end());
    return run;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "capacity"}; }

std::string preset_json(const std::string& name) {
    ordered_json doc;
    doc["name"] = name;
    if (name == "fig1") {
        const double mu[4] = {0.75, 1.25, 1.75, 1.5}, p[4] = {0.1, 0.2, 0.3, 0.4};
        for (int i = 0; i < 4; ++i) doc["branches"].push_back(branch_i(mu[i], 0.5, p[i], 0.0));
        doc["sweep"] = {axis_values("eta", {0.2, 0.5, 0.9}),
                        axis_range("common-gbar-dB", 0.0, 40.0, 41)};
        doc["metrics"] = {"outage"};
        doc["options"] = {{"threshold_db", 0.0}};
        doc["sim"] = sim_block(true, 100000);
    } else if (name == "fig2") {
        doc["branches"] = {branch_i(1.5, 1.0, 1.0, 0.0, 2)};
        doc["sweep"] = {axis_values("common-gbar-dB", {0.0, 5.0, 7.5, 10.0, 15.0}),
                        axis_range("eta", 0.1, 2.1, 41), axis_range("p", 0.1, 2.1, 41)};
        doc["metrics"] = {"outage"};
        doc["options"] = {{"threshold_db", 0.0}};
        doc["sim"] = sim_block(false, 100000);
    } else if (name == "fig3") {
        for (double eta : {0.25, 0.5, 0.75}) doc["branches"].push_back(branch_i(1.0, eta, 0.5, 0.0));
        doc["sweep"] = {axis_values("mu", {0.5, 1.0, 1.5, 2.0, 4.0}),
                        axis_range("common-gbar-dB", 0.0, 30.0, 31)};
        doc["metrics"] = {"ser"};
        doc["options"] = {{"modulation", "BPSK"}};
        doc["sim"] = sim_block(true, 100000);
    } else if (name == "capacity") {
        doc["branches"] = {branch_i(1.0, 0.25, 0.25, 0.0, 3)};
        doc["sweep"] = {axis_range("common-gbar-dB", 0.0, 20.0, 21)};
        doc["metrics"] = {"capacity"};
        const CapacityFit fit;
        doc["options"] = {{"capacity_fit", {{"deltas", fit.deltas}, {"sigmas", fit.sigmas}}}};
        doc["sim"] = sim_block(true, 100000);
    } else {
        throw DomainError("preset_json: unknown preset '" + name + "'");
    }
    doc["output"] = {{"directory", "."}, {"prefix", name}};
    return doc.dump(2) + "\n";
}

}  // namespace etamu
