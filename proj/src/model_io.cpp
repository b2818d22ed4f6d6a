#include "trendsim/model_io.hpp"

#include "text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

namespace trendsim {

namespace {

struct Token {
    std::string_view text;
    std::size_t column = 0;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const std::size_t begin = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > begin) {
            tokens.push_back(Token{line.substr(begin, i - begin), begin + 1});
        }
    }
    return tokens;
}

class DocumentParser {
public:
    ParsedModel run(std::string_view text) {
        const auto rows = text::lines(text);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            line_ = i + 1;
            auto row = rows[i];
            if (const auto hash = row.find('#'); hash != std::string_view::npos) {
                row = row.substr(0, hash);
            }
            const auto tokens = tokenize(row);
            if (tokens.empty()) {
                continue;
            }
            const auto directive = tokens[0].text;
            if (directive == "model") {
                parse_model_line(tokens);
            } else if (directive == "element") {
                parse_element(tokens);
            } else if (directive == "hyperedge") {
                parse_hyperedge(tokens);
            } else {
                error(tokens[0].column, "unknown directive '" + std::string(directive) +
                                            "' (expected model, element or hyperedge)");
            }
        }
        if (!has_errors(out_.diagnostics)) {
            out_.model = std::move(model_);
        }
        return std::move(out_);
    }

private:
    void error(std::size_t column, std::string message) {
        auto d = make_error(std::move(message));
        d.line = line_;
        d.column = column;
        out_.diagnostics.push_back(std::move(d));
    }

    // key=value tokens; returns false after reporting a problem.
    bool collect(const std::vector<Token>& tokens, std::size_t first, const std::set<std::string_view>& allowed,
                 std::unordered_map<std::string_view, Token>& fields) {
        bool ok = true;
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            const auto eq = tok.text.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                error(tok.column, "expected key=value, got '" + std::string(tok.text) + "'");
                ok = false;
                continue;
            }
            const auto key = tok.text.substr(0, eq);
            if (!allowed.count(key)) {
                error(tok.column, "unknown key '" + std::string(key) + "'");
                ok = false;
                continue;
            }
            if (fields.count(key)) {
                error(tok.column, "duplicate key '" + std::string(key) + "'");
                ok = false;
                continue;
            }
            fields.emplace(key, Token{tok.text.substr(eq + 1), tok.column + eq + 1});
        }
        return ok;
    }

    bool require(const std::unordered_map<std::string_view, Token>& fields, std::string_view key,
                 std::size_t column) {
        if (fields.count(key)) {
            return true;
        }
        error(column, "missing " + std::string(key) + "=");
        return false;
    }

    std::optional<int> integer(const Token& tok, std::string_view what) {
        const auto v = text::parse_int<int>(tok.text);
        if (!v) {
            error(tok.column, "expected an integer " + std::string(what) + ", got '" + std::string(tok.text) + "'");
        }
        return v;
    }

    void parse_model_line(const std::vector<Token>& tokens) {
        if (tokens.size() != 2) {
            error(tokens[0].column, "expected 'model <name>'");
            return;
        }
        if (seen_model_) {
            error(tokens[0].column, "duplicate model directive");
            return;
        }
        if (!is_valid_name(tokens[1].text)) {
            error(tokens[1].column, "invalid model name '" + std::string(tokens[1].text) + "'");
            return;
        }
        seen_model_ = true;
        model_.name = std::string(tokens[1].text);
    }

    void parse_element(const std::vector<Token>& tokens) {
        if (tokens.size() < 2 || tokens[1].text.find('=') != std::string_view::npos) {
            error(tokens[0].column, "expected 'element <id> levels=<L> init=<k>'");
            return;
        }
        if (!is_valid_name(tokens[1].text)) {
            error(tokens[1].column, "invalid element name '" + std::string(tokens[1].text) + "'");
            return;
        }
        std::unordered_map<std::string_view, Token> fields;
        if (!collect(tokens, 2, {"levels", "init"}, fields) | !require(fields, "levels", tokens[0].column) |
            !require(fields, "init", tokens[0].column)) {
            return;
        }
        const auto levels = integer(fields.at("levels"), "level count");
        const auto init = integer(fields.at("init"), "initial level");
        if (!levels || !init) {
            return;
        }
        model_.elements.push_back(Element{std::string(tokens[1].text), *levels, *init, {}});
        out_.element_lines.push_back(line_);
    }

    void parse_hyperedge(const std::vector<Token>& tokens) {
        std::unordered_map<std::string_view, Token> fields;
        const auto col = tokens[0].column;
        if (!collect(tokens, 1, {"target", "sign", "mode", "when", "tails"}, fields) |
            !require(fields, "target", col) | !require(fields, "sign", col) | !require(fields, "mode", col) |
            !require(fields, "tails", col)) {
            return;
        }
        Hyperedge h;
        bool ok = true;

        const auto& target = fields.at("target");
        if (!is_valid_name(target.text)) {
            error(target.column, "invalid element name '" + std::string(target.text) + "'");
            ok = false;
        }
        h.target = std::string(target.text);

        const auto& sign = fields.at("sign");
        if (sign.text == "pos") {
            h.sign = Sign::positive;
        } else if (sign.text == "neg") {
            h.sign = Sign::negative;
        } else {
            error(sign.column, "sign must be pos or neg, got '" + std::string(sign.text) + "'");
            ok = false;
        }

        const auto& mode = fields.at("mode");
        if (mode.text == "level") {
            h.mode = Mode::level;
        } else if (mode.text == "trend") {
            h.mode = Mode::trend;
        } else if (mode.text == "hybrid") {
            h.mode = Mode::hybrid;
        } else {
            error(mode.column, "mode must be level, trend or hybrid, got '" + std::string(mode.text) + "'");
            ok = false;
        }

        if (const auto it = fields.find("when"); it != fields.end()) {
            const auto& when = it->second;
            const auto parts = text::split(when.text, ':');
            if (parts.size() != 2 || !is_valid_name(parts[0])) {
                error(when.column, "expected when=<id>:<level>, got '" + std::string(when.text) + "'");
                ok = false;
            } else if (const auto level = integer(Token{parts[1], when.column + parts[0].size() + 1}, "gate level")) {
                h.gate = Gate{std::string(parts[0]), *level};
            } else {
                ok = false;
            }
        }

        const auto& tails = fields.at("tails");
        std::size_t offset = 0;
        for (const auto entry : text::split(tails.text, ',')) {
            const std::size_t column = tails.column + offset;
            offset += entry.size() + 1;
            const auto parts = text::split(entry, ':');
            if (parts.size() != 3 || !is_valid_name(parts[0])) {
                error(column, "expected tail <id>:<wv>:<wt>, got '" + std::string(entry) + "'");
                ok = false;
                continue;
            }
            const auto wv = text::parse_real(parts[1]);
            const auto wt = text::parse_real(parts[2]);
            if (!wv || !wt) {
                error(column, "malformed weight in tail '" + std::string(entry) + "'");
                ok = false;
                continue;
            }
            h.tails.push_back(Tail{std::string(parts[0]), *wv, *wt});
        }
        if (ok) {
            model_.hyperedges.push_back(std::move(h));
            out_.hyperedge_lines.push_back(line_);
        }
    }

    ParsedModel out_;
    Model model_;
    std::size_t line_ = 0;
    bool seen_model_ = false;
};

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_toggle_rows(std::string& out, const std::string& element, const ToggleSequence& toggles) {
    for (const auto& t : toggles) {
        out += element;
        out += ',';
        out += std::to_string(t.step);
        out += ',';
        out += std::to_string(t.level);
        out += '\n';
    }
}

nlohmann::json scheme_to_json(const Scheme& scheme) {
    nlohmann::json j;
    j["type"] = std::string(scheme_name(scheme));
    if (const auto* seq = std::get_if<SequentialFixed>(&scheme)) {
        j["order"] = seq->order;
    } else if (const auto* group = std::get_if<GroupUpdate>(&scheme)) {
        auto groups = nlohmann::json::array();
        for (const auto& g : group->groups) {
            groups.push_back({{"name", g.name}, {"members", g.members}});
        }
        j["groups"] = groups;
    }
    return j;
}

Scheme scheme_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "simultaneous") {
        return Simultaneous{};
    }
    if (type == "rsb") {
        return RandomSequential{};
    }
    if (type == "seq-fixed") {
        return SequentialFixed{j.at("order").get<std::vector<std::string>>()};
    }
    if (type == "group") {
        GroupUpdate group;
        for (const auto& g : j.at("groups")) {
            group.groups.push_back(
                UpdateGroup{g.at("name").get<std::string>(), g.at("members").get<std::vector<std::string>>()});
        }
        return group;
    }
    throw InputError("unknown scheme '" + type + "' in metadata");
}

}  // namespace

ParsedModel parse_model(std::string_view text) {
    return DocumentParser{}.run(text);
}

std::string serialize_model(const Model& model) {
    std::string out;
    if (!model.name.empty()) {
        out += "model " + model.name + "\n";
    }
    for (const auto& e : model.elements) {
        out += "element " + e.name + " levels=" + std::to_string(e.levels) + " init=" +
               std::to_string(e.initial_level) + "\n";
    }
    for (const auto& h : model.hyperedges) {
        out += "hyperedge target=" + h.target + " sign=" + std::string(to_string(h.sign)) +
               " mode=" + std::string(to_string(h.mode));
        if (h.gate) {
            out += " when=" + h.gate->element + ":" + std::to_string(h.gate->level);
        }
        out += " tails=";
        for (std::size_t i = 0; i < h.tails.size(); ++i) {
            const auto& t = h.tails[i];
            if (i > 0) {
                out += ',';
            }
            out += t.regulator + ":" + text::shortest(t.level_weight) + ":" + text::shortest(t.trend_weight);
        }
        out += '\n';
    }
    return out;
}

ToggleTable parse_toggles(std::string_view csv) {
    const auto rows = text::lines(csv);
    if (rows.empty() || text::trim(rows[0]) != "element,step,level") {
        throw InputError("toggle file must start with the header 'element,step,level'");
    }
    ToggleTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto row = text::trim(rows[i]);
        if (row.empty()) {
            continue;
        }
        const auto where = "toggles line " + std::to_string(i + 1) + ": ";
        const auto fields = text::split(row, ',');
        if (fields.size() != 3) {
            throw InputError(where + "expected 3 fields, got " + std::to_string(fields.size()));
        }
        const auto name = text::trim(fields[0]);
        const auto step = text::parse_int<std::size_t>(text::trim(fields[1]));
        const auto level = text::parse_int<int>(text::trim(fields[2]));
        if (!is_valid_name(name)) {
            throw InputError(where + "invalid element name '" + std::string(name) + "'");
        }
        if (!step) {
            throw InputError(where + "malformed step '" + std::string(fields[1]) + "'");
        }
        if (!level || *level < 0) {
            throw InputError(where + "malformed level '" + std::string(fields[2]) + "'");
        }
        auto& seq = table[std::string(name)];
        const auto pos = std::lower_bound(seq.begin(), seq.end(), *step,
                                          [](const Toggle& t, std::size_t s) { return t.step < s; });
        if (pos != seq.end() && pos->step == *step) {
            throw InputError(where + "duplicate toggle for '" + std::string(name) + "' at step " +
                             std::to_string(*step));
        }
        seq.insert(pos, Toggle{*step, *level});
    }
    return table;
}

std::string write_toggles_csv(const ToggleTable& toggles) {
    std::string out = "element,step,level\n";
    for (const auto& [element, seq] : toggles) {
        write_toggle_rows(out, element, seq);
    }
    return out;
}

std::string write_toggles_csv(const Model& model) {
    std::string out = "element,step,level\n";
    for (const auto& e : model.elements) {
        write_toggle_rows(out, e.name, e.toggles);
    }
    return out;
}

std::vector<Diagnostic> bind_toggles(Model& model, const ToggleTable& toggles) {
    std::vector<Diagnostic> diags;
    for (const auto& [element, seq] : toggles) {
        const auto it = std::find_if(model.elements.begin(), model.elements.end(),
                                     [&](const Element& e) { return e.name == element; });
        if (it == model.elements.end()) {
            diags.push_back(make_error("unknown element '" + element + "'", "toggles"));
            continue;
        }
        it->toggles = seq;
    }
    return diags;
}

ValidationResult load_model(std::string_view text, const ToggleTable* toggles) {
    auto parsed = parse_model(text);
    ValidationResult result;
    if (!parsed.model) {
        result.diagnostics = std::move(parsed.diagnostics);
        return result;
    }
    Model model = std::move(*parsed.model);
    if (toggles) {
        auto diags = bind_toggles(model, *toggles);
        if (has_errors(diags)) {
            result.diagnostics = std::move(diags);
            return result;
        }
    }
    result = validate_model(model);
    for (auto& d : result.diagnostics) {
        if (d.element_index && *d.element_index < parsed.element_lines.size()) {
            d.line = parsed.element_lines[*d.element_index];
        } else if (d.hyperedge_index && *d.hyperedge_index < parsed.hyperedge_lines.size()) {
            d.line = parsed.hyperedge_lines[*d.hyperedge_index];
        }
    }
    return result;
}

std::string write_trace_csv(const CompiledModel& model, const RunTrace& trace) {
    std::string out = "step";
    for (std::size_t e = 0; e < model.element_count(); ++e) {
        out += ',';
        out += model.element_name(element_id(e));
    }
    out += '\n';
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        out += std::to_string(trace.steps[row]);
        for (std::size_t e = 0; e < model.element_count(); ++e) {
            const ElementId id = element_id(e);
            out += ',';
            out += text::fixed(model.value(id, trace.level(row, id)), 6);
        }
        out += '\n';
    }
    return out;
}

std::string write_average_csv(const AveragedTrajectory& average) {
    std::string out = "step";
    for (const auto& name : average.elements) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t row = 0; row < average.rows(); ++row) {
        out += std::to_string(average.steps[row]);
        for (std::size_t e = 0; e < average.elements.size(); ++e) {
            out += ',';
            out += text::fixed(average.mean(row, e), 6);
        }
        out += '\n';
    }
    return out;
}

AveragedTrajectory read_average_csv(std::string_view csv) {
    const auto rows = text::lines(csv);
    if (rows.empty()) {
        throw InputError("trajectory file is empty");
    }
    const auto header = text::split(text::trim(rows[0]), ',');
    if (header.size() < 2 || header[0] != "step") {
        throw InputError("trajectory header must be 'step,<element>,...'");
    }
    AveragedTrajectory avg;
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (!is_valid_name(header[i])) {
            throw InputError("trajectory header has invalid element name '" + std::string(header[i]) + "'");
        }
        avg.elements.emplace_back(header[i]);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto row = text::trim(rows[i]);
        if (row.empty()) {
            continue;
        }
        const auto where = "trajectory line " + std::to_string(i + 1) + ": ";
        const auto fields = text::split(row, ',');
        if (fields.size() != header.size()) {
            throw InputError(where + "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        const auto step = text::parse_int<std::size_t>(fields[0]);
        if (!step) {
            throw InputError(where + "malformed step '" + std::string(fields[0]) + "'");
        }
        avg.steps.push_back(*step);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            const auto v = text::parse_real(fields[k]);
            if (!v) {
                throw InputError(where + "malformed value '" + std::string(fields[k]) + "'");
            }
            avg.means.push_back(*v);
        }
    }
    return avg;
}

std::string write_saturation_report(const CompiledModel& model, const SaturationReport& report) {
    std::string out = "element,boundary,first_step,runs_affected,runs,dwell_fraction\n";
    for (const auto& e : report.entries) {
        out += model.element_name(e.element) + "," + std::string(to_string(e.boundary)) + "," +
               std::to_string(e.first_step) + "," + std::to_string(e.runs_affected) + "," +
               std::to_string(report.runs) + "," + text::fixed(e.dwell_fraction, 6) + "\n";
    }
    return out;
}

std::string model_digest(const Model& model) {
    const std::string canonical = serialize_model(model) + "\n" + write_toggles_csv(model);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return std::string("fnv1a64:") + buf;
}

RunMetadata make_metadata(const CompiledModel& model, const SimulationConfig& config) {
    RunMetadata meta;
    meta.model_name = model.name();
    meta.model_digest = model_digest(model.source());
    meta.config = config;
    return meta;
}

std::string write_metadata(const RunMetadata& metadata) {
    nlohmann::json j;
    j["tool"] = metadata.tool;
    j["version"] = metadata.version;
    j["model_name"] = metadata.model_name;
    j["model_digest"] = metadata.model_digest;
    j["prng"] = metadata.prng;
    j["seed_derivation"] = "base_seed + run_index";
    j["scheme"] = scheme_to_json(metadata.config.scheme);
    j["steps"] = metadata.config.steps;
    j["runs"] = metadata.config.runs;
    j["base_seed"] = metadata.config.base_seed;
    j["record_every"] = metadata.config.record_every;
    return j.dump(2) + "\n";
}

RunMetadata read_metadata(std::string_view json) {
    try {
        const auto j = nlohmann::json::parse(json);
        RunMetadata meta;
        meta.tool = j.at("tool").get<std::string>();
        meta.version = j.at("version").get<std::string>();
        meta.model_name = j.at("model_name").get<std::string>();
        meta.model_digest = j.at("model_digest").get<std::string>();
        meta.prng = j.at("prng").get<std::string>();
        if (meta.prng != kRngName) {
            throw InputError("metadata uses generator '" + meta.prng + "', this build only provides " +
                             std::string(kRngName));
        }
        meta.config.scheme = scheme_from_json(j.at("scheme"));
        meta.config.steps = j.at("steps").get<std::size_t>();
        meta.config.runs = j.at("runs").get<std::size_t>();
        meta.config.base_seed = j.at("base_seed").get<std::uint64_t>();
        meta.config.record_every = j.at("record_every").get<std::size_t>();
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed metadata: ") + e.what());
    }
}

}  // namespace trendsim
