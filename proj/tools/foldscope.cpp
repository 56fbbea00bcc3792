// foldscope: command-line front end for space-folding analysis of MLPs.
//
// Exit codes: 0 success, 1 usage/validation, 2 I/O, 3 numeric failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "foldscope/foldscope.hpp"

namespace fs = foldscope;

namespace {

std::vector<double> parse_point(const std::string& text, std::size_t expected_dim, const char* flag) {
    std::vector<double> x;
    for (auto part : fs::detail::split(text, ',')) {
        double v = 0.0;
        if (!fs::detail::parse_double(part, v) || !std::isfinite(v)) {
            throw fs::ValidationError(std::string(flag) + ": '" + std::string(part) + "' is not a finite number");
        }
        x.push_back(v);
    }
    if (x.size() != expected_dim) {
        throw fs::DimensionError(std::string(flag) + " has dimension " + std::to_string(x.size()) +
                                 ", model expects dimension " + std::to_string(expected_dim));
    }
    return x;
}

std::vector<std::size_t> parse_depths(const std::string& text) {
    std::vector<std::size_t> out;
    for (auto part : fs::detail::split(text, ',')) {
        out.push_back(fs::detail::parse_int_value<std::size_t>("--depths", fs::detail::trim(part)));
    }
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        fs::write_text_file(path, content);
    }
}

std::string companion_csv_path(const std::string& out) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot) + ".csv";
    return out + ".csv";
}

std::string path_csv(const fs::PathSample& p) {
    std::string out = "index,entry_t,pattern\n";
    for (std::size_t i = 0; i < p.patterns.size(); ++i) {
        out += std::to_string(i) + "," + fs::detail::format_double(p.entry_ts[i]) + "," + p.patterns[i].to_string() + "\n";
    }
    return out;
}

std::string report_csv(const fs::FoldingReport& r) {
    return "r1,r2,chi_num,chi_den,chi,chi_reversed_num,chi_reversed_den,chi_reversed,n_patterns,flat\n" +
           std::to_string(r.r1) + "," + std::to_string(r.r2) + "," + std::to_string(r.chi.num()) + "," +
           std::to_string(r.chi.den()) + "," + fs::detail::format_double(r.chi.to_double()) + "," +
           std::to_string(r.chi_reversed.num()) + "," + std::to_string(r.chi_reversed.den()) + "," +
           fs::detail::format_double(r.chi_reversed.to_double()) + "," + std::to_string(r.n_patterns) + "," +
           (r.flat ? "true" : "false") + "\n";
}

struct Options {
    std::string model;
    std::string data;
    std::string from;
    std::string to;
    std::string out;
    std::string csv;
    std::string format = "json";
    std::string config;
    std::string out_model;
    std::string out_history;
    std::string depths;
    double dinit = fs::kDefaultDeltaInit;
    double dmin = fs::kDefaultDeltaMin;
    std::int64_t budget = 200;
    std::int64_t phi_budget = 50;
    std::uint64_t seed = 0;
};

fs::PathSample run_sampler(const Options& o, const fs::Mlp& net) {
    const auto x1 = parse_point(o.from, net.input_dim(), "--from");
    const auto x2 = parse_point(o.to, net.input_dim(), "--to");
    return fs::sample_adaptive(net, x1, x2, o.dinit, o.dmin);
}

int cmd_sample(const Options& o) {
    const auto net = fs::load_model_file(o.model);
    const auto path = run_sampler(o, net);
    emit(o.out, o.format == "csv" ? path_csv(path) : fs::dump_json(fs::to_json(path)));
    return 0;
}

int cmd_chi(const Options& o) {
    const auto net = fs::load_model_file(o.model);
    const auto report = fs::fold_report(run_sampler(o, net));
    emit(o.out, o.format == "csv" ? report_csv(report) : fs::dump_json(fs::to_json(report)));
    return 0;
}

int cmd_global(const Options& o) {
    const auto net = fs::load_model_file(o.model);
    const auto data = fs::load_dataset_file(o.data);
    fs::GlobalOptions opts;
    opts.sampler = {o.dinit, o.dmin};
    const auto report = fs::global_phi(net, data, o.budget, o.seed, opts);
    const auto csv = fs::global_report_csv(report);
    if (o.format == "csv") {
        emit(o.out, csv);
        return 0;
    }
    emit(o.out, fs::dump_json(fs::to_json(report)));
    std::string csv_path = o.csv;
    if (csv_path.empty() && !o.out.empty() && o.out != "-") csv_path = companion_csv_path(o.out);
    if (!csv_path.empty()) fs::write_text_file(csv_path, csv);
    return 0;
}

int cmd_train(const Options& o) {
    const auto cfg = fs::load_train_config_file(o.config);
    const auto res = fs::train(cfg);
    if (!o.out_model.empty()) fs::save_model_file(res.net, o.out_model);
    if (!o.out_history.empty()) fs::write_text_file(o.out_history, fs::history_to_csv(res.history));
    fs::GlobalOptions opts;
    opts.sampler = {o.dinit, o.dmin};
    opts.include_intra = false;
    const auto phi = fs::global_phi(res.net, res.data, o.phi_budget, cfg.seed, opts);
    std::cout << "final_accuracy=" << fs::detail::format_double(res.history.epochs.back().accuracy)
              << " final_phi=" << fs::detail::format_double(phi.phi_decimal) << "\n";
    return 0;
}

int cmd_depth_sweep(const Options& o) {
    const auto cfg = fs::load_train_config_file(o.config);
    const auto depths = parse_depths(o.depths);
    const auto rows = fs::depth_sweep(cfg, depths, o.budget, {o.dinit, o.dmin});
    if (o.format == "json") {
        fs::Json j = fs::Json::array();
        for (const auto& r : rows) {
            fs::Json row;
            row["depth"] = r.depth;
            row["accuracy"] = r.accuracy;
            row["phi"] = r.phi;
            j.push_back(std::move(row));
        }
        emit(o.out, fs::dump_json(j));
    } else {
        emit(o.out, fs::depth_sweep_csv(rows));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-folding analysis of feed-forward networks"};
    app.require_subcommand(1);
    Options o;

    const auto add_sampler = [&](CLI::App* sub) {
        sub->add_option("--dinit", o.dinit, "Initial step in t")->capture_default_str();
        sub->add_option("--dmin", o.dmin, "Smallest step in t")->capture_default_str();
    };
    const auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    };

    auto* sample = app.add_subcommand("sample", "Walk a segment and emit the visited activation patterns");
    sample->add_option("--model", o.model, "Weight JSON")->required();
    sample->add_option("--from", o.from, "Start point, comma-separated")->required();
    sample->add_option("--to", o.to, "End point, comma-separated")->required();
    sample->add_option("--out", o.out, "Output path (default stdout)");
    add_sampler(sample);
    add_format(sample);

    auto* chi = app.add_subcommand("chi", "Folding measure of one segment");
    chi->add_option("--model", o.model, "Weight JSON")->required();
    chi->add_option("--from", o.from, "Start point, comma-separated")->required();
    chi->add_option("--to", o.to, "End point, comma-separated")->required();
    chi->add_option("--out", o.out, "Output path (default stdout)");
    add_sampler(chi);
    add_format(chi);

    auto* global = app.add_subcommand("global", "Global folding over class pairs of a dataset");
    global->add_option("--model", o.model, "Weight JSON")->required();
    global->add_option("--data", o.data, "Dataset CSV (x_0..x_{d-1},label)")->required();
    global->add_option("--budget", o.budget, "Sampled point pairs per class pair")->capture_default_str();
    global->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    global->add_option("--out", o.out, "Report path (default stdout)");
    global->add_option("--csv", o.csv, "Per-pair CSV path (default: report path with .csv)");
    add_sampler(global);
    add_format(global);

    auto* trn = app.add_subcommand("train", "Train an MLP on a synthetic task");
    trn->add_option("--config", o.config, "key = value config file")->required();
    trn->add_option("--out-model", o.out_model, "Trained weight JSON");
    trn->add_option("--out-history", o.out_history, "History CSV");
    trn->add_option("--phi-budget", o.phi_budget, "Pairs per class pair for the final global folding")->capture_default_str();
    add_sampler(trn);

    auto* sweep = app.add_subcommand("depth-sweep", "Train one net per depth and tabulate accuracy and folding");
    sweep->add_option("--config", o.config, "Template config file")->required();
    sweep->add_option("--depths", o.depths, "Comma-separated hidden-layer counts")->required();
    sweep->add_option("--budget", o.budget, "Pairs per class pair")->capture_default_str();
    sweep->add_option("--out", o.out, "Output path (default stdout)");
    sweep->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    add_sampler(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    if (sweep->parsed() && sweep->count("--format") == 0) o.format = "csv";

    try {
        if (sample->parsed()) return cmd_sample(o);
        if (chi->parsed()) return cmd_chi(o);
        if (global->parsed()) return cmd_global(o);
        if (trn->parsed()) return cmd_train(o);
        if (sweep->parsed()) return cmd_depth_sweep(o);
    } catch (const fs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
