/*
 * Copyright 2026 The sortbo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "sortbo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sortbo/config.hpp"
#include "sortbo/gpr.hpp"
#include "sortbo/ledger_io.hpp"
#include "sortbo/parallel.hpp"

namespace sortbo {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string point_text(const ParameterPoint& p, int precision) {
    return "T_R=" + fixed(p.reaction_lines, precision) + " E_T=" + fixed(p.extended_time, precision) +
           " S_E=" + fixed(p.extended_space, precision);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

double number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw std::invalid_argument("invalid " + what + " '" + text + "'");
    }
    return v;
}

std::vector<double> numbers(const std::string& text, std::size_t expected, const std::string& what) {
    const auto parts = split(text, ',');
    if (parts.size() != expected) {
        throw std::invalid_argument(what + " needs " + std::to_string(expected) + " comma-separated values");
    }
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(number(p, what));
    return out;
}

std::vector<double> grid_dimension(const std::string& text) {
    if (text.find(':') == std::string::npos) {
        std::vector<double> out;
        for (const auto& p : split(text, ',')) out.push_back(number(p, "grid value"));
        if (out.empty()) throw std::invalid_argument("empty grid dimension");
        return out;
    }
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("grid range must be lo:hi[:step]");
    const double lo = number(parts[0], "grid bound");
    const double hi = number(parts[1], "grid bound");
    const double step = parts.size() == 3 ? number(parts[2], "grid step") : 1.0;
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid range needs lo <= hi and step > 0");
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

AppConfig load_for(const RunManifest& m) {
    AppConfig cfg = m.config_path.empty() ? AppConfig{} : load_config(m.config_path);
    if (m.seed_override) cfg.simulator.seed = *m.seed_override;
    if (m.workers) {
        if (*m.workers < 1) throw UsageError("--workers must be >= 1");
        cfg.workers = *m.workers;
    }
    if (m.duration_s) cfg.duration_s = *m.duration_s;
    if (m.interval_s) cfg.interval_s = *m.interval_s;
    try {
        cfg.optimization().validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

fs::path prepare_ledger(const RunManifest& m) {
    const fs::path dir = m.output_dir.empty() ? fs::path(".") : fs::path(m.output_dir);
    fs::create_directories(dir);
    const fs::path ledger = dir / "ledger.jsonl";
    if (fs::exists(ledger) && !m.force) {
        throw UsageError("refusing to overwrite " + ledger.string() + " (pass --force)");
    }
    return ledger;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// Configuration and usage problems exit with 1, everything else with 2.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

ConfusionMatrix total_confusion(const ExperimentRecord& r) {
    ConfusionMatrix sum;
    for (const auto& iv : r.intervals) sum += iv.confusion;
    return sum;
}

}  // namespace

CombinedWeights parse_weights(const std::string& text) {
    const auto v = numbers(text, 2, "weights");
    return CombinedWeights(v[0], v[1]);
}

ParameterPoint parse_params(const std::string& text) {
    const auto v = numbers(text, 3, "params");
    const ParameterPoint p{v[0], v[1], v[2]};
    if (!is_valid(p)) throw std::invalid_argument("params must be non-negative");
    return p;
}

DesignGrid parse_grid(const std::string& text) {
    const auto dims = split(text, '/');
    if (dims.size() != kParameterDims) throw std::invalid_argument("grid needs three '/'-separated dimensions");
    return {grid_dimension(dims[0]), grid_dimension(dims[1]), grid_dimension(dims[2])};
}

ReportMode parse_report_mode(const std::string& text) {
    if (text == "variance_study") return ReportMode::variance_study;
    if (text == "surface") return ReportMode::surface;
    if (text == "ledger_csv") return ReportMode::ledger_csv;
    throw std::invalid_argument("unknown report mode '" + text + "'");
}

void write_posterior_surface(std::ostream& out, const std::vector<ExperimentRecord>& records,
                             const std::string& model, const std::vector<double>& lambdas,
                             int points_per_dim, std::size_t workers) {
    if (model != "accept" && model != "reject") throw std::invalid_argument("model must be accept or reject");
    if (records.empty()) throw std::invalid_argument("surface needs records");
    if (points_per_dim < 2) throw std::invalid_argument("surface needs at least 2 points per dimension");
    const bool accept = model == "accept";
    std::vector<ParameterPoint> params;
    for (const auto& r : records) params.push_back(r.params);
    const SearchSpace box = derive_search_space(params, 0.0);

    FitOptions options;
    options.workers = workers;
    const KernelParams kernel =
        fit(training_set(records, kDefaultNoiseWeight, accept), initial_kernel(box), true, options).kernel();

    const auto n = static_cast<std::size_t>(points_per_dim);
    std::vector<ParameterPoint> grid;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                ParameterPoint p;
                const std::size_t idx[3] = {i, j, k};
                for (std::size_t d = 0; d < kParameterDims; ++d) {
                    p[d] = box.lower[d] +
                           (box.upper[d] - box.lower[d]) * static_cast<double>(idx[d]) / static_cast<double>(n - 1);
                }
                grid.push_back(p);
            }
        }
    }

    out << "lambda,reaction_lines,extended_time,extended_space,mean,variance\n";
    for (const double lambda : lambdas) {
        const GprModel m = fit(training_set(records, lambda, accept), kernel, false, options);
        std::vector<Posterior> post(grid.size());
        parallel_for(grid.size(), workers, [&](std::size_t i) { post[i] = m.predict(grid[i]); });
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << format_double(lambda) << ',' << format_double(grid[i].reaction_lines) << ','
                << format_double(grid[i].extended_time) << ',' << format_double(grid[i].extended_space) << ','
                << format_double(post[i].mean) << ',' << format_double(post[i].variance) << '\n';
        }
    }
}

int cmd_simulate(const RunManifest& manifest, const ParameterPoint& params, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const AppConfig cfg = load_for(manifest);
        const fs::path ledger = prepare_ledger(manifest);
        SimulatorPlant plant(cfg.simulator, cfg.duration_s, cfg.interval_s);
        const ExperimentRecord record = plant.execute(params, 0);
        write_ledger_file(ledger.string(), {record});

        out << "params   " << point_text(params, 2) << '\n';
        out << "tp_n     " << fixed(record.tp_n_mean, 6) << " (var " << sci(record.tp_n_var) << ")\n";
        out << "tn_n     " << fixed(record.tn_n_mean, 6) << " (var " << sci(record.tn_n_var) << ")\n";
        out << "accuracy " << fixed(accuracy(total_confusion(record)), 6) << '\n';
        out << "intervals " << record.intervals.size() << '\n';
        return kExitOk;
    });
}

int cmd_sweep(const RunManifest& manifest, const std::optional<DesignGrid>& grid,
              const std::optional<CombinedWeights>& weights, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const AppConfig cfg = load_for(manifest);
        const fs::path ledger = prepare_ledger(manifest);
        const auto points = build_initial_design(grid ? *grid : cfg.sweep_grid);
        if (points.empty()) throw UsageError("sweep grid is empty");
        SimulatorPlant plant(cfg.simulator, cfg.duration_s, cfg.interval_s);

        std::vector<std::optional<ExperimentRecord>> results(points.size());
        std::vector<std::string> failures(points.size());
        parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
            try {
                SimulatorPlant local = plant;
                results[i] = local.execute(points[i], i);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        });

        std::vector<LedgerEntry> entries;
        std::vector<ExperimentRecord> records;
        std::size_t failed = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (results[i]) {
                entries.emplace_back(*results[i]);
                records.push_back(*results[i]);
            } else {
                ++failed;
                err << "point " << i << " (" << point_text(points[i], 2) << ") failed: " << failures[i] << '\n';
            }
        }
        write_ledger_file(ledger.string(), entries);
        std::ostringstream csv;
        write_ledger_csv(csv, records);
        write_text_file(ledger.parent_path() / "surface.csv", csv.str());

        out << "records  " << records.size() << '\n';
        if (!records.empty()) {
            const CombinedWeights w = weights ? *weights : cfg.optimizer.weights;
            const Maximum best = reference_best(records, w, std::nullopt, cfg.workers);
            out << "reference_best " << point_text(best.point, 4) << " value " << fixed(best.value, 6) << '\n';
        }
        if (failed > 0) {
            err << failed << " of " << points.size() << " sweep points failed\n";
            return kExitRuntime;
        }
        return kExitOk;
    });
}

int cmd_optimize(const RunManifest& manifest, const std::optional<CombinedWeights>& weights, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        const AppConfig cfg = load_for(manifest);
        const fs::path ledger = prepare_ledger(manifest);
        OptimizationConfig opt = cfg.optimization();
        if (weights) opt.weights = *weights;
        SimulatorPlant plant(cfg.simulator, opt.duration_s, opt.interval_s);
        const RunResult result = run(opt, plant);
        write_ledger_file(ledger.string(), result.ledger.entries());

        out << "step  T_R    E_T    S_E    combined_EI  (raw proposal)\n";
        for (const auto& p : result.ledger.proposals()) {
            char line[160];
            std::snprintf(line, sizeof line, "%-5d %-6g %-6g %-6g %-12.3e (%.2f, %.2f, %.2f)\n", p.step,
                          p.actuated.reaction_lines, p.actuated.extended_time, p.actuated.extended_space,
                          p.combined_ei_value, p.raw.reaction_lines, p.raw.extended_time, p.raw.extended_space);
            out << line;
        }
        const auto& best = result.ledger.records()[best_record_index(result.ledger.records(), opt.weights)];
        out << "best     " << point_text(result.best, 0) << " tp_n " << fixed(best.tp_n_mean, 6) << " tn_n "
            << fixed(best.tn_n_mean, 6) << '\n';
        out << "records  " << result.ledger.records().size() << '\n';
        out << "status   " << to_string(result.status) << " after " << result.steps << " steps\n";
        return kExitOk;
    });
}

int cmd_report(const RunManifest& manifest, const ReportOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const fs::path dir = manifest.output_dir.empty() ? fs::path(".") : fs::path(manifest.output_dir);
        const fs::path ledger = dir / "ledger.jsonl";
        if (!fs::exists(ledger)) {
            err << "error: no ledger at " << ledger.string() << '\n';
            return kExitRuntime;
        }
        const auto records = records_of(read_ledger_file(ledger.string()));
        std::ostringstream csv;
        fs::path target;
        switch (options.mode) {
            case ReportMode::ledger_csv:
                write_ledger_csv(csv, records);
                target = dir / "ledger.csv";
                break;
            case ReportMode::variance_study: {
                std::vector<std::vector<IntervalResult>> experiments;
                for (const auto& r : records) experiments.push_back(r.intervals);
                const auto rows = variance_study(experiments, options.times);
                write_variance_csv(csv, rows);
                target = dir / "variance_study.csv";
                if (rows.size() >= 3) {
                    out << "slope " << fixed(variance_scaling_fit(rows), 4) << '\n';
                } else {
                    err << "only " << rows.size() << " acquisition times usable, no slope fitted\n";
                }
                break;
            }
            case ReportMode::surface: {
                const std::size_t workers = manifest.workers.value_or(1);
                write_posterior_surface(csv, records, options.model, options.lambdas, options.points_per_dim,
                                        workers);
                target = dir / "posterior_surface.csv";
                break;
            }
        }
        write_text_file(target, csv.str());
        out << "wrote " << target.string() << '\n';
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian optimization of sensor-based sorting parameters"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double duration = 0.0;
    double interval = 0.0;
    std::string weights_text, grid_text, params_text, mode_text = "ledger_csv", model = "accept";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", manifest.config_path, "YAML configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override simulator.seed");
        sub->add_option("--out", manifest.output_dir, "output directory");
        sub->add_flag("--force", manifest.force, "overwrite an existing ledger");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--duration", duration, "experiment duration in seconds");
        sub->add_option("--interval", interval, "measurement interval in seconds");
    };

    auto* simulate = app.add_subcommand("simulate", "run one experiment");
    common(simulate);
    simulate->add_option("--params", params_text, "tr,et,se")->required();

    auto* sweep = app.add_subcommand("sweep", "run every point of a grid");
    common(sweep);
    sweep->add_option("--grid", grid_text, "e.g. 12:21/0:8:2/0:8:2");
    sweep->add_option("--weights", weights_text, "wa,wr for the reference optimum");

    auto* optimize = app.add_subcommand("optimize", "run the optimization loop");
    common(optimize);
    optimize->add_option("--weights", weights_text, "wa,wr");

    auto* report = app.add_subcommand("report", "export CSV from a ledger");
    report->add_option("--out", manifest.output_dir, "directory holding ledger.jsonl");
    report->add_option("--mode", mode_text, "variance_study, surface or ledger_csv");
    report->add_option("--model", model, "accept or reject (surface mode)");
    report->add_option("--workers", workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
    CLI::App* active = app.get_subcommands().front();
    manifest.command = active->get_name();
    if (given(active, "--workers")) manifest.workers = workers;
    if (active != report) {
        if (given(active, "--seed")) manifest.seed_override = seed;
        if (given(active, "--duration")) manifest.duration_s = duration;
        if (given(active, "--interval")) manifest.interval_s = interval;
    }

    std::optional<CombinedWeights> weights;
    std::optional<DesignGrid> grid;
    ParameterPoint params;
    ReportOptions report_options;
    try {
        if (!weights_text.empty()) weights = parse_weights(weights_text);
        if (!grid_text.empty()) grid = parse_grid(grid_text);
        if (!params_text.empty()) params = parse_params(params_text);
        report_options.mode = parse_report_mode(mode_text);
        if (model != "accept" && model != "reject") throw std::invalid_argument("--model must be accept or reject");
        report_options.model = model;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (active == simulate) return cmd_simulate(manifest, params, out, err);
    if (active == sweep) return cmd_sweep(manifest, grid, weights, out, err);
    if (active == optimize) return cmd_optimize(manifest, weights, out, err);
    return cmd_report(manifest, report_options, out, err);
}

}  // namespace sortbo
