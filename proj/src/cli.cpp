#include "trendsim/cli.hpp"

#include "text.hpp"

#include "trendsim/analytics.hpp"
#include "trendsim/ingest.hpp"
#include "trendsim/model_io.hpp"
#include "trendsim/plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace trendsim {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
        throw InputError("cannot write '" + path.string() + "'");
    }
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    for (const auto part : text::split(s, sep)) {
        const auto item = text::trim(part);
        if (!item.empty()) {
            out.emplace_back(item);
        }
    }
    return out;
}

void print_diagnostics(std::ostream& err, const std::vector<Diagnostic>& diags, std::string_view source) {
    for (const auto& d : diags) {
        err << format_diagnostic(d, source) << '\n';
    }
}

ToggleTable load_toggle_files(const std::vector<std::string>& paths) {
    ToggleTable merged;
    for (const auto& path : paths) {
        ToggleTable table;
        try {
            table = parse_toggles(read_file(path));
        } catch (const InputError& e) {
            throw InputError(path + ": " + e.what());
        }
        for (auto& [element, seq] : table) {
            if (!merged.emplace(element, std::move(seq)).second) {
                throw InputError(path + ": toggles for '" + element + "' already given in another file");
            }
        }
    }
    return merged;
}

CompiledModel load_or_report(const std::string& model_path, const std::vector<std::string>& toggle_paths,
                             std::ostream& err) {
    const auto toggles = load_toggle_files(toggle_paths);
    auto result = load_model(read_file(model_path), &toggles);
    print_diagnostics(err, result.diagnostics, model_path);
    if (!result.model) {
        throw InputError("'" + model_path + "' is not a valid model", result.diagnostics);
    }
    return std::move(*result.model);
}

struct ValidateArgs {
    std::string model;
    std::vector<std::string> toggles;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    const auto model = load_or_report(args.model, args.toggles, err);
    std::size_t edges = model.source().hyperedges.size();
    out << args.model << ": ok (" << model.element_count() << " elements, " << edges << " hyperedges, "
        << model.update_pool().size() << " updateable)\n";
    return 0;
}

struct RunArgs {
    std::string model;
    std::vector<std::string> toggles;
    std::string scheme = "rsb";
    std::string order;
    std::string groups;
    std::size_t steps = 0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool average_only = false;
    unsigned jobs = 1;
    std::size_t record_every = 1;
};

Scheme build_scheme(const RunArgs& args) {
    const bool has_order = !args.order.empty();
    const bool has_groups = !args.groups.empty();
    if (args.scheme == "seq-fixed") {
        if (!has_order) {
            throw InputError("--scheme seq-fixed requires --order a,b,... listing every regulated element");
        }
        if (has_groups) {
            throw InputError("--groups only applies to --scheme group");
        }
        return SequentialFixed{split_list(args.order, ',')};
    }
    if (has_order) {
        throw InputError("--order only applies to --scheme seq-fixed");
    }
    if (args.scheme == "group") {
        if (!has_groups) {
            throw InputError("--scheme group requires --groups \"a,b;c,d\" partitioning the regulated elements");
        }
        GroupUpdate group;
        for (const auto& members : split_list(args.groups, ';')) {
            group.groups.push_back(
                UpdateGroup{"g" + std::to_string(group.groups.size() + 1), split_list(members, ',')});
        }
        return group;
    }
    if (has_groups) {
        throw InputError("--groups only applies to --scheme group");
    }
    if (args.scheme == "rsb") {
        return RandomSequential{};
    }
    if (args.scheme == "simultaneous") {
        return Simultaneous{};
    }
    throw InputError("unknown scheme '" + args.scheme + "' (expected simultaneous, seq-fixed, rsb or group)");
}

std::string run_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04zu.csv", index);
    return buf;
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    const auto model = load_or_report(args.model, args.toggles, err);
    SimulationConfig config;
    config.scheme = build_scheme(args);
    config.steps = args.steps;
    config.runs = args.runs;
    config.base_seed = args.seed;
    config.record_every = args.record_every;
    (void)resolve_scheme(model, config.scheme);  // report scheme errors before touching the output directory

    const fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create output directory '" + args.out_dir + "': " + ec.message());
    }

    EnsembleSummary summary;
    if (args.average_only) {
        summary = summarize(model, config, args.jobs);
    } else {
        const auto ensemble = simulate(model, config, args.jobs);
        for (std::size_t i = 0; i < ensemble.runs.size(); ++i) {
            write_file(dir / run_file_name(i), write_trace_csv(model, ensemble.runs[i]));
        }
        summary.average = average(model, ensemble);
        summary.saturation = saturation_report(model, ensemble);
    }
    write_file(dir / "average.csv", write_average_csv(summary.average));
    write_file(dir / "metadata.json", write_metadata(make_metadata(model, config)));
    write_file(dir / "saturation.txt", write_saturation_report(model, summary.saturation));

    for (const auto& entry : summary.saturation.entries) {
        err << "note: " << model.element_name(entry.element) << " hit its " << to_string(entry.boundary)
            << " level with overflow in " << entry.runs_affected << " of " << summary.saturation.runs
            << " runs (first at step " << entry.first_step << "); consider more levels\n";
    }
    out << "wrote " << config.runs << (args.average_only ? " averaged runs" : " runs") << " of " << config.steps
        << " steps to " << args.out_dir << '\n';
    return 0;
}

struct IngestArgs {
    std::string raw;
    std::string element;
    std::string agg;
    int levels = 0;
    std::string extend;
    std::size_t horizon = 0;
    std::string out;
    std::string start;
    std::string cadence;
};

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
    if (!is_valid_name(args.element)) {
        throw InputError("invalid element name '" + args.element + "'");
    }
    const auto method = ingest::parse_aggregation(args.agg);
    std::optional<ingest::Cadence> cadence;
    if (!args.cadence.empty()) {
        cadence = ingest::parse_cadence(args.cadence);
    }
    std::optional<ingest::Extension> extension;
    if (!args.extend.empty()) {
        extension = ingest::parse_extension(args.extend);
        if (!extension) {
            throw InputError("unknown --extend '" + args.extend + "' (expected periodic:<months> or hold)");
        }
    }

    ingest::RawSeries raw;
    try {
        raw = ingest::read_raw_csv(read_file(args.raw), args.element, cadence);
    } catch (const InputError& e) {
        throw InputError(args.raw + ": " + e.what());
    }
    const auto monthly = ingest::aggregate_monthly(raw, method);
    const auto bins = ingest::discretize_uniform(monthly.values, args.levels);
    if (bins.constant) {
        err << "warning: " << args.raw << ": series is constant; every step maps to level 0\n";
    }

    auto aligned = monthly;
    if (!args.start.empty()) {
        const auto start = ingest::parse_month(args.start);
        if (!start) {
            throw InputError("--start expects YYYY-MM, got '" + args.start + "'");
        }
        aligned = ingest::align_start(monthly, *start);
    }
    if (aligned.values.size() < args.horizon) {
        if (!extension) {
            throw InputError("series covers " + std::to_string(aligned.values.size()) + " months but --horizon is " +
                             std::to_string(args.horizon) + "; pass --extend periodic:12 or --extend hold");
        }
        aligned = ingest::extend_series(aligned, *extension, args.horizon);
    }
    aligned.values.resize(args.horizon);

    std::vector<int> levels;
    levels.reserve(aligned.values.size());
    for (const double v : aligned.values) {
        levels.push_back(ingest::bin_index(v, bins.min, bins.max, args.levels));
    }
    ToggleTable table;
    table[args.element] = ingest::series_to_toggles(levels, args.levels);
    write_file(args.out, write_toggles_csv(table));

    nlohmann::json meta;
    meta["element"] = args.element;
    meta["source"] = fs::path(args.raw).filename().string();
    meta["cadence"] = std::string(ingest::to_string(raw.cadence));
    meta["aggregation"] = std::string(ingest::to_string(method));
    meta["gap_fill"] = "forward-fill";
    meta["yearly_fill"] = "forward-fill to every month of the year";
    meta["start"] = aligned.start.to_string();
    meta["data_months"] = monthly.values.size();
    meta["filled_months"] = aligned.filled_months;
    meta["extension"] = extension ? ingest::describe(*extension) : "none";
    meta["horizon"] = args.horizon;
    meta["levels"] = args.levels;
    meta["bin_min"] = bins.min;
    meta["bin_max"] = bins.max;
    meta["constant"] = bins.constant;
    meta["toggles"] = table[args.element].size();
    write_file(args.out + ".meta.json", meta.dump(2) + "\n");

    out << "wrote " << table[args.element].size() << " toggles for " << args.element << " to " << args.out << '\n';
    return 0;
}

struct PlotArgs {
    std::string avg;
    std::string elements;
    std::string out;
};

std::string plot_label(const fs::path& path) {
    if (path.filename() == "average.csv" && path.has_parent_path() && !path.parent_path().filename().empty()) {
        return path.parent_path().filename().string();
    }
    return path.stem().string();
}

int cmd_plot(const PlotArgs& args, std::ostream& out) {
    std::vector<PlotInput> inputs;
    for (const auto& file : split_list(args.avg, ',')) {
        try {
            inputs.push_back(PlotInput{plot_label(file), read_average_csv(read_file(file))});
        } catch (const InputError& e) {
            throw InputError(file + ": " + e.what());
        }
    }
    write_file(args.out, render_plot(inputs, split_list(args.elements, ',')));
    out << "wrote " << args.out << '\n';
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-level dynamic network simulator with trend-based regulation", "trendsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    ValidateArgs validate;
    auto* validate_cmd = app.add_subcommand("validate", "Check a model file and report diagnostics");
    validate_cmd->add_option("model", validate.model, "Model file")->required();
    validate_cmd->add_option("--toggles", validate.toggles, "Toggle CSV to bind (repeatable)");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate an ensemble and write traces, averages and metadata");
    run_cmd->add_option("--model", run.model, "Model file")->required();
    run_cmd->add_option("--toggles", run.toggles, "Toggle CSV (repeatable)");
    run_cmd->add_option("--scheme", run.scheme, "simultaneous, seq-fixed, rsb or group")
        ->check(CLI::IsMember({"simultaneous", "seq-fixed", "rsb", "group"}))
        ->capture_default_str();
    run_cmd->add_option("--order", run.order, "Update order for seq-fixed, e.g. a,b,c");
    run_cmd->add_option("--groups", run.groups, "Groups for group scheme, e.g. \"a,b;c,d\"");
    run_cmd->add_option("--steps", run.steps, "Number of steps T")->required()->check(CLI::PositiveNumber);
    run_cmd->add_option("--runs", run.runs, "Number of runs N")->required()->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", run.seed, "Base seed; run i uses seed + i")->capture_default_str();
    run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->required();
    run_cmd->add_flag("--average-only", run.average_only, "Skip per-run trace files");
    run_cmd->add_option("--jobs", run.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    run_cmd->add_option("--record-every", run.record_every, "Record every k-th step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest", "Turn a raw date,value series into a toggle CSV");
    ingest_cmd->add_option("--raw", ingest_args.raw, "Raw CSV with header date,value")->required();
    ingest_cmd->add_option("--element", ingest_args.element, "Element the toggles drive")->required();
    ingest_cmd->add_option("--agg", ingest_args.agg, "Monthly aggregation: sum or mean")
        ->required()
        ->check(CLI::IsMember({"sum", "mean"}));
    ingest_cmd->add_option("--levels", ingest_args.levels, "Level count L of the element")
        ->required()
        ->check(CLI::Range(2, 1000000));
    ingest_cmd->add_option("--extend", ingest_args.extend, "periodic:<months> or hold");
    ingest_cmd->add_option("--horizon", ingest_args.horizon, "Number of monthly steps to emit")
        ->required()
        ->check(CLI::PositiveNumber);
    ingest_cmd->add_option("--out", ingest_args.out, "Output toggle CSV")->required();
    ingest_cmd->add_option("--start", ingest_args.start, "First simulated month, YYYY-MM");
    ingest_cmd->add_option("--cadence", ingest_args.cadence, "Override cadence: daily, monthly or yearly");

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render averaged trajectories as SVG");
    plot_cmd->add_option("--avg", plot.avg, "Average CSVs, comma separated")->required();
    plot_cmd->add_option("--elements", plot.elements, "Elements to plot, comma separated")->required();
    plot_cmd->add_option("--out", plot.out, "Output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(validate, out, err);
        }
        if (run_cmd->parsed()) {
            return cmd_run(run, out, err);
        }
        if (ingest_cmd->parsed()) {
            return cmd_ingest(ingest_args, out, err);
        }
        return cmd_plot(plot, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace trendsim
