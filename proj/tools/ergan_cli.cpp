// ergan: synthetic residential load pattern toolkit.
//
// Subcommands cover the full flow (ingest -> select-k -> cluster -> train ->
// generate -> evaluate) plus a one-shot `pipeline` and a `fixture` data
// generator. Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
// failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ergan/cluster.hpp"
#include "ergan/dataset.hpp"
#include "ergan/ensemble.hpp"
#include "ergan/errors.hpp"
#include "ergan/eval.hpp"
#include "ergan/fixture.hpp"
#include "ergan/gan.hpp"
#include "ergan/pipeline.hpp"
#include "ergan/svg.hpp"

namespace fs = std::filesystem;
using namespace ergan;

namespace {

struct RunConfig {
    std::string workspace;
    std::string input;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    std::size_t fixed_k = 0;
    std::size_t k_lo = 2, k_hi = 12;
    std::size_t m = 0;  // 0 -> train set size
    std::size_t jobs = 1;
    std::size_t bins = 50;
    std::size_t max_lag = 23;
    bool svg = false;
    bool paper_scale = false;
    TrainConfig train;
    std::size_t log_interval = 100;
};

void log_line(const std::string& stage, const std::string& message) {
    std::printf("[%s] %s\n", stage.c_str(), message.c_str());
    std::fflush(stdout);
}

fs::path ws_path(const RunConfig& cfg, const std::string& sub) {
    return fs::path(cfg.workspace) / sub;
}

void ensure_workspace(const RunConfig& cfg) {
    for (const char* dir : {"dataset", "clusters", "checkpoints", "synthetic", "reports"}) {
        fs::create_directories(ws_path(cfg, dir));
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path.string());
    return f;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

Dataset load_workspace_csv(const RunConfig& cfg, const std::string& name) {
    const fs::path path = ws_path(cfg, "dataset") / name;
    if (!fs::exists(path)) {
        throw DataError(path.string() + " not found; run `ergan ingest` first");
    }
    return load_dataset_csv(path.string());
}

// --- ingest ------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) throw DataError("cannot read input CSV " + cfg.input);
    ensure_workspace(cfg);

    const auto readings = parse_readings(in);
    const auto segmented = segment_daily(readings);
    Dataset dataset;
    std::size_t constant_dropped = 0;
    for (const RawDay& day : segmented.days) {
        try {
            dataset.profiles.push_back(normalize(day));
        } catch (const DataError&) {
            ++constant_dropped;
            log_line("ingest", "warning: dropped constant profile " + day.household_id + "_" +
                                   day.day_start.date_string());
        }
    }
    if (dataset.empty()) throw DataError("no profiles survived ingestion");
    auto [train, validation] = split(dataset, cfg.train_fraction, cfg.seed);
    if (train.empty() || validation.empty()) {
        throw DataError("split produced an empty train or validation set (N=" +
                        std::to_string(dataset.size()) + ")");
    }

    save_dataset_csv(dataset, (ws_path(cfg, "dataset") / "dataset.csv").string());
    save_dataset_csv(train, (ws_path(cfg, "dataset") / "train.csv").string());
    save_dataset_csv(validation, (ws_path(cfg, "dataset") / "validation.csv").string());

    auto report = open_out(ws_path(cfg, "dataset") / "ingest_report.txt");
    report << "readings_parsed " << readings.size() << "\n"
           << "complete_days " << segmented.days.size() << "\n"
           << "days_dropped_missing_hours " << segmented.days_dropped << "\n"
           << "readings_in_dropped_days " << segmented.readings_dropped << "\n"
           << "constant_profiles_dropped " << constant_dropped << "\n"
           << "profiles_kept " << dataset.size() << "\n"
           << "train_profiles " << train.size() << "\n"
           << "validation_profiles " << validation.size() << "\n";
    log_line("ingest", std::to_string(dataset.size()) + " profiles (" +
                           std::to_string(train.size()) + " train / " +
                           std::to_string(validation.size()) + " validation), " +
                           std::to_string(segmented.days_dropped) + " days dropped, " +
                           std::to_string(constant_dropped) + " constant profiles dropped");
}

// --- clustering --------------------------------------------------------------

void write_k_selection(const RunConfig& cfg, const KSelectionReport& report) {
    auto out = open_out(ws_path(cfg, "clusters") / "k_selection.csv");
    out << "K,db_index,chosen\n";
    for (const auto& [k, db] : report.candidates) {
        out << k << "," << fmt(db) << "," << (k == report.chosen_k ? 1 : 0) << "\n";
    }
}

KSelectionReport cmd_select_k(const RunConfig& cfg) {
    Dataset train = load_workspace_csv(cfg, "train.csv");
    ensure_workspace(cfg);
    const std::size_t hi = std::min(cfg.k_hi, train.size() - 1);
    if (hi < cfg.k_lo) {
        throw DataError("K range [" + std::to_string(cfg.k_lo) + ", " + std::to_string(cfg.k_hi) +
                        "] is not usable for N=" + std::to_string(train.size()));
    }
    auto report = select_k(train, cfg.k_lo, hi, cfg.seed);
    write_k_selection(cfg, report);
    log_line("select-k", "chose K=" + std::to_string(report.chosen_k) + " over [" +
                             std::to_string(cfg.k_lo) + ", " + std::to_string(hi) + "]");
    return report;
}

std::size_t chosen_k_from_workspace(const RunConfig& cfg) {
    const fs::path path = ws_path(cfg, "clusters") / "k_selection.csv";
    std::ifstream in(path);
    if (!in) {
        throw DataError("no --k given and " + path.string() +
                        " not found; run `ergan select-k` first");
    }
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        if (c1 == std::string::npos || c2 == c1) continue;
        if (line.substr(c2 + 1) == "1") {
            return static_cast<std::size_t>(std::stoul(line.substr(0, c1)));
        }
    }
    throw DataError("no chosen K recorded in " + path.string());
}

ClusterModel cmd_cluster(const RunConfig& cfg, std::size_t k) {
    Dataset train = load_workspace_csv(cfg, "train.csv");
    ensure_workspace(cfg);
    ClusterModel model = kmeans(train, k, cfg.seed);
    if (k >= 2) model.db_index = db_index(train, model.labels, model.centroids);
    save_cluster_model(model, (ws_path(cfg, "clusters") / "model.txt").string());
    std::string sizes;
    for (std::size_t s : model.cluster_sizes()) sizes += std::to_string(s) + " ";
    log_line("cluster", "K=" + std::to_string(k) + " wcss=" + fmt(model.wcss) +
                            " db=" + fmt(model.db_index) + " sizes: " + sizes);
    return model;
}

// --- training ----------------------------------------------------------------

TrainConfig resolved_train_config(const RunConfig& cfg) {
    TrainConfig t = cfg.train;
    t.log_every = cfg.log_interval;
    t.log_prefix = "[train]";
    return t;
}

void write_loss_history(const RunConfig& cfg, const GanPair& pair) {
    auto out = open_out(ws_path(cfg, "checkpoints") /
                        ("loss_k" + std::to_string(pair.cluster_index) + ".csv"));
    out << "epoch,g_loss,d_loss\n";
    for (std::size_t e = 0; e < pair.loss_history.size(); ++e) {
        out << e << "," << fmt(pair.loss_history[e].first) << ","
            << fmt(pair.loss_history[e].second) << "\n";
    }
}

std::vector<GanPair> cmd_train(const RunConfig& cfg) {
    Dataset train = load_workspace_csv(cfg, "train.csv");
    const fs::path model_path = ws_path(cfg, "clusters") / "model.txt";
    if (!fs::exists(model_path)) {
        throw DataError(model_path.string() + " not found; run `ergan cluster` first");
    }
    ClusterModel model = load_cluster_model(model_path.string());
    ensure_workspace(cfg);
    auto gans = train_clusters(train, model, resolved_train_config(cfg), cfg.seed, cfg.jobs);
    for (const GanPair& pair : gans) {
        save_checkpoint(pair, (ws_path(cfg, "checkpoints") /
                               ("gan_k" + std::to_string(pair.cluster_index) + ".ckpt"))
                                  .string());
        write_loss_history(cfg, pair);
    }
    log_line("train", "trained " + std::to_string(gans.size()) + " cluster GAN(s), " +
                          std::to_string(cfg.train.epochs) + " epochs each");
    return gans;
}

// --- generation ---------------------------------------------------------------

Dataset cmd_generate(const RunConfig& cfg) {
    const fs::path model_path = ws_path(cfg, "clusters") / "model.txt";
    if (!fs::exists(model_path)) {
        throw DataError(model_path.string() + " not found; run `ergan cluster` first");
    }
    ClusterModel model = load_cluster_model(model_path.string());
    std::vector<GeneratorNet> generators;
    for (std::size_t k = 0; k < model.k; ++k) {
        const fs::path ckpt = ws_path(cfg, "checkpoints") / ("gan_k" + std::to_string(k) + ".ckpt");
        if (!fs::exists(ckpt)) {
            throw DataError(ckpt.string() + " not found; run `ergan train` first");
        }
        generators.push_back(load_checkpoint(ckpt.string()).gen);
    }
    ensure_workspace(cfg);
    const std::size_t m = cfg.m == 0 ? model.labels.size() : cfg.m;
    SynthesisPlan plan = make_plan(m, model.cluster_sizes());
    Dataset synthetic = synthesize(generators, plan, synthesis_seed(cfg.seed));
    save_dataset_csv(synthetic, (ws_path(cfg, "synthetic") / "synthetic.csv").string());
    std::string alloc;
    for (std::size_t c : plan.allocation) alloc += std::to_string(c) + " ";
    log_line("generate", "synthesized " + std::to_string(synthetic.size()) +
                             " profiles, allocation: " + alloc);
    return synthetic;
}

// --- evaluation ---------------------------------------------------------------

void evaluate_datasets(const Dataset& real, const Dataset& synth, const fs::path& out_dir,
                       const std::string& label, std::size_t bins, std::size_t max_lag,
                       bool emit_svg) {
    fs::create_directories(out_dir);
    const StatProfileSet rs = hourly_profiles(real);
    const StatProfileSet ss = hourly_profiles(synth);
    const L1Report l1 = l1_distance(rs, ss);

    {
        auto out = open_out(out_dir / "l1_report.csv");
        out << "label,mean_l1,variance_l1,q1_l1,q3_l1\n";
        out << label << "," << fmt(l1.mean_l1) << "," << fmt(l1.variance_l1) << ","
            << fmt(l1.q1_l1) << "," << fmt(l1.q3_l1) << "\n";
    }
    {
        auto out = open_out(out_dir / "hourly_stats.csv");
        out << "hour,real_mean,real_variance,real_q1,real_q3,synth_mean,synth_variance,"
               "synth_q1,synth_q3\n";
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            out << t << "," << fmt(rs.mean[t]) << "," << fmt(rs.variance[t]) << ","
                << fmt(rs.q1[t]) << "," << fmt(rs.q3[t]) << "," << fmt(ss.mean[t]) << ","
                << fmt(ss.variance[t]) << "," << fmt(ss.q1[t]) << "," << fmt(ss.q3[t]) << "\n";
        }
    }
    const auto real_hist = histogram(real, bins);
    const auto synth_hist = histogram(synth, bins);
    {
        auto out = open_out(out_dir / "histogram.csv");
        out << "bin_lo,bin_hi,real_fraction,synth_fraction\n";
        for (std::size_t b = 0; b < bins; ++b) {
            out << fmt(static_cast<double>(b) / bins) << ","
                << fmt(static_cast<double>(b + 1) / bins) << "," << fmt(real_hist[b]) << ","
                << fmt(synth_hist[b]) << "\n";
        }
    }
    const auto real_acf = dataset_acf(real, max_lag);
    const auto synth_acf = dataset_acf(synth, max_lag);
    {
        auto out = open_out(out_dir / "acf.csv");
        out << "lag,real_acf,synth_acf\n";
        for (std::size_t l = 0; l <= max_lag; ++l) {
            out << l << "," << fmt(real_acf[l]) << "," << fmt(synth_acf[l]) << "\n";
        }
    }
    const auto real_boxes = boxplot_stats(real);
    const auto synth_boxes = boxplot_stats(synth);
    {
        auto out = open_out(out_dir / "boxplot.csv");
        out << "dataset,hour,lo_whisker,q1,median,q3,hi_whisker,outliers\n";
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            const HourBoxStats& b = real_boxes[t];
            out << "real," << t << "," << fmt(b.lo_whisker) << "," << fmt(b.q1) << ","
                << fmt(b.median) << "," << fmt(b.q3) << "," << fmt(b.hi_whisker) << ","
                << b.outliers << "\n";
        }
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            const HourBoxStats& b = synth_boxes[t];
            out << "synthetic," << t << "," << fmt(b.lo_whisker) << "," << fmt(b.q1) << ","
                << fmt(b.median) << "," << fmt(b.q3) << "," << fmt(b.hi_whisker) << ","
                << b.outliers << "\n";
        }
    }
    if (emit_svg) {
        write_text_file((out_dir / "histogram.svg").string(),
                        svg_histogram_overlay(real_hist, synth_hist));
        write_text_file((out_dir / "boxplot.svg").string(),
                        svg_hourly_boxplots(real_boxes, synth_boxes));
        write_text_file((out_dir / "acf.svg").string(), svg_acf_curves(real_acf, synth_acf));
    }
    log_line("evaluate", "L1 (" + label + "): mean=" + fmt(l1.mean_l1) + " variance=" +
                             fmt(l1.variance_l1) + " q1=" + fmt(l1.q1_l1) + " q3=" +
                             fmt(l1.q3_l1));
}

// --- pipeline -----------------------------------------------------------------

template <typename F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const NumericError& e) {
        throw NumericError("pipeline stage " + std::string(name) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("pipeline stage " + std::string(name) + ": " + e.what());
    }
}

void cmd_pipeline(RunConfig& cfg) {
    // Stage order follows the end-to-end flow: ingest, select K, cluster,
    // train, generate, evaluate. Artifacts are written as stages complete so
    // failures leave partial results behind for inspection.
    if (!cfg.input.empty()) {
        stage("ingest", [&] { cmd_ingest(cfg); return 0; });
    } else if (!fs::exists(ws_path(cfg, "dataset") / "train.csv")) {
        throw DataError("pipeline needs --input or an already ingested workspace");
    }

    std::size_t k = cfg.fixed_k;
    if (k == 0) {
        k = stage("select-k", [&] { return cmd_select_k(cfg).chosen_k; });
    }
    stage("cluster", [&] { return cmd_cluster(cfg, k); });
    stage("train", [&] { return cmd_train(cfg); });
    Dataset synthetic = stage("generate", [&] { return cmd_generate(cfg); });
    stage("evaluate", [&] {
        Dataset validation = load_workspace_csv(cfg, "validation.csv");
        evaluate_datasets(validation, synthetic, ws_path(cfg, "reports"),
                          "ergan_k" + std::to_string(k), cfg.bins, cfg.max_lag, cfg.svg);
        return 0;
    });
    log_line("pipeline", "done; artifacts under " + cfg.workspace);
}

// --- fixture ------------------------------------------------------------------

std::vector<FixtureSpec> parse_fixture_spec(const std::vector<std::string>& items) {
    std::vector<FixtureSpec> spec;
    for (const std::string& item : items) {
        const auto c1 = item.find(':');
        const auto c2 = item.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw DataError("bad --spec entry '" + item + "', expected name:count:noise");
        }
        FixtureSpec s;
        s.archetype = archetype_from_name(item.substr(0, c1));
        try {
            s.count = std::stoul(item.substr(c1 + 1, c2 - c1 - 1));
            s.noise = std::stod(item.substr(c2 + 1));
        } catch (const std::exception&) {
            throw DataError("bad --spec entry '" + item + "', expected name:count:noise");
        }
        spec.push_back(s);
    }
    return spec;
}

void cmd_fixture(const std::vector<std::string>& spec_items, const std::string& out_path,
                 const std::string& format, std::uint64_t seed) {
    const auto spec = parse_fixture_spec(spec_items);
    Dataset d = fixture_generate(spec, seed);
    auto out = open_out(out_path);
    if (format == "readings") {
        write_fixture_readings_csv(d, out);
    } else if (format == "dataset") {
        save_dataset_csv(d, out);
    } else {
        throw DataError("unknown fixture format '" + format + "' (readings|dataset)");
    }
    log_line("fixture", "wrote " + std::to_string(d.size()) + " profiles to " + out_path +
                            " as " + format);
}

void echo_config(const RunConfig& cfg, CLI::App& app) {
    if (cfg.workspace.empty()) return;
    std::error_code ec;
    fs::create_directories(cfg.workspace, ec);
    if (ec) return;
    std::ofstream f(ws_path(cfg, "config_resolved.toml"));
    if (f) f << app.config_to_str(true, true);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergan - synthetic residential load patterns via clustered recurrent GANs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; explicit flags win");

    RunConfig cfg;
    const char* env_ws = std::getenv("ERGAN_WORKSPACE");
    cfg.workspace = env_ws ? env_ws : "ergan_workspace";
    cfg.train.epochs = 500;  // desk-scale default; --paper-scale restores 10000

    // options shared across subcommands (registered per subcommand so each
    // --help stays focused)
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workspace", cfg.workspace,
                        "Workspace directory (env ERGAN_WORKSPACE overrides the default)")
            ->capture_default_str();
        sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    };
    auto add_train_options = [&](CLI::App* sub) {
        sub->add_option("--epochs", cfg.train.epochs, "Training epochs per cluster GAN")
            ->capture_default_str();
        sub->add_option("--batch-size", cfg.train.batch_size,
                        "Batch size (capped at the cluster size)")
            ->capture_default_str();
        sub->add_option("--lambda", cfg.train.lambda, "Statistical-matching weight")
            ->capture_default_str();
        sub->add_option("--gen-lr", cfg.train.gen_lr, "Generator Adam learning rate")
            ->capture_default_str();
        sub->add_option("--disc-lr", cfg.train.disc_lr, "Discriminator Adam learning rate")
            ->capture_default_str();
        sub->add_option("--hidden", cfg.train.hidden, "LSTM hidden units per direction")
            ->capture_default_str();
        sub->add_option("--layers", cfg.train.layers, "Stacked Bi-LSTM layers")
            ->capture_default_str();
        sub->add_flag("--non-saturating", cfg.train.non_saturating,
                      "Use -log D(G(z)) instead of log(1 - D(G(z)))");
        sub->add_option_function<std::string>(
               "--stat-mode",
               [&cfg](const std::string& value) {
                   if (value == "pattern_scalar") {
                       cfg.train.stat_mode = StatLossMode::kPatternScalar;
                   } else if (value == "hourly_vector") {
                       cfg.train.stat_mode = StatLossMode::kHourlyVector;
                   } else {
                       throw CLI::ValidationError("--stat-mode",
                                                  "must be pattern_scalar or hourly_vector");
                   }
               },
               "Statistical term reading: pattern_scalar|hourly_vector")
            ->default_str("pattern_scalar");
        sub->add_option("--jobs", cfg.jobs, "Concurrent cluster trainings")
            ->capture_default_str();
        sub->add_option("--log-interval", cfg.log_interval,
                        "Epoch interval for loss log lines (0 silences them)")
            ->capture_default_str();
        sub->add_flag("--paper-scale", cfg.paper_scale,
                      "Restore full-scale training hyperparameters (10000 epochs, batch 1024)");
    };
    auto add_eval_options = [&](CLI::App* sub) {
        sub->add_option("--bins", cfg.bins, "Histogram bin count")->capture_default_str();
        sub->add_option("--max-lag", cfg.max_lag, "Largest ACF lag (<= 23)")
            ->capture_default_str();
        sub->add_flag("--svg", cfg.svg, "Also emit SVG plots");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse raw readings into normalized datasets");
    ingest->add_option("--input", cfg.input, "Raw readings CSV (household_id,timestamp,kwh)")
        ->required();
    ingest->add_option("--train-fraction", cfg.train_fraction, "Training split fraction")
        ->capture_default_str();
    add_common(ingest);

    auto* selectk = app.add_subcommand("select-k", "Score candidate K values by the DB index");
    selectk->add_option_function<std::string>(
        "--k-range",
        [&cfg](const std::string& value) {
            const auto pos = value.find("..");
            if (pos == std::string::npos) {
                throw CLI::ValidationError("--k-range", "expected a..b");
            }
            try {
                cfg.k_lo = std::stoul(value.substr(0, pos));
                cfg.k_hi = std::stoul(value.substr(pos + 2));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--k-range", "expected a..b");
            }
            if (cfg.k_lo < 2 || cfg.k_hi > 64 || cfg.k_hi < cfg.k_lo) {
                throw CLI::ValidationError("--k-range", "must satisfy 2 <= a <= b <= 64");
            }
        },
        "Candidate range, e.g. 2..12");
    add_common(selectk);

    auto* cluster_cmd = app.add_subcommand("cluster", "K-means cluster the training set");
    cluster_cmd->add_option("--k", cfg.fixed_k, "Cluster count (default: select-k's choice)");
    add_common(cluster_cmd);

    auto* train_cmd = app.add_subcommand("train", "Train one GAN per cluster");
    add_train_options(train_cmd);
    add_common(train_cmd);

    auto* generate = app.add_subcommand("generate", "Synthesize the ensemble dataset");
    generate->add_option("--m", cfg.m, "Synthetic profile count (default: training set size)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    add_common(generate);

    std::string eval_real, eval_synth, eval_out, eval_label = "synthetic";
    auto* evaluate = app.add_subcommand("evaluate", "Compare a synthetic dataset against a real one");
    evaluate->add_option("--real", eval_real, "Real dataset CSV")->required();
    evaluate->add_option("--synthetic", eval_synth, "Synthetic dataset CSV")->required();
    evaluate->add_option("--out-dir", eval_out, "Report directory (default: workspace reports/)");
    evaluate->add_option("--label", eval_label, "Row label in l1_report.csv")
        ->capture_default_str();
    add_eval_options(evaluate);
    add_common(evaluate);

    auto* pipeline = app.add_subcommand("pipeline", "Run the whole flow in one shot");
    pipeline->add_option("--input", cfg.input,
                         "Raw readings CSV (omit to reuse an ingested workspace)");
    pipeline->add_option("--train-fraction", cfg.train_fraction, "Training split fraction")
        ->capture_default_str();
    pipeline->add_option("--k", cfg.fixed_k, "Fix the cluster count (skips select-k)");
    pipeline->add_option_function<std::string>(
        "--k-range",
        [&cfg](const std::string& value) {
            const auto pos = value.find("..");
            if (pos == std::string::npos) {
                throw CLI::ValidationError("--k-range", "expected a..b");
            }
            try {
                cfg.k_lo = std::stoul(value.substr(0, pos));
                cfg.k_hi = std::stoul(value.substr(pos + 2));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--k-range", "expected a..b");
            }
            if (cfg.k_lo < 2 || cfg.k_hi > 64 || cfg.k_hi < cfg.k_lo) {
                throw CLI::ValidationError("--k-range", "must satisfy 2 <= a <= b <= 64");
            }
        },
        "Candidate range when K is not fixed, e.g. 2..12");
    pipeline->add_option("--m", cfg.m, "Synthetic profile count (default: training set size)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    add_train_options(pipeline);
    add_eval_options(pipeline);
    add_common(pipeline);

    std::vector<std::string> fixture_spec;
    std::string fixture_out = "fixture.csv", fixture_format = "readings";
    std::uint64_t fixture_seed = 0;
    auto* fixture = app.add_subcommand("fixture", "Generate a deterministic fixture dataset");
    fixture->add_option("--spec", fixture_spec,
                        "Archetype spec name:count:noise (repeatable); archetypes: "
                        "morning_peak, evening_peak, dual_peak, flat_night")
        ->required();
    fixture->add_option("--out", fixture_out, "Output CSV path")->capture_default_str();
    fixture->add_option("--format", fixture_format, "readings|dataset")->capture_default_str();
    fixture->add_option("--seed", fixture_seed, "Fixture seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (cfg.paper_scale) {
        // Restore full-scale hyperparameters unless explicitly overridden.
        CLI::App* sub = app.get_subcommands().front();
        if (sub->count("--epochs") == 0) cfg.train.epochs = 10000;
        if (sub->count("--batch-size") == 0) cfg.train.batch_size = 1024;
        if (sub->count("--hidden") == 0) cfg.train.hidden = 16;
        if (sub->count("--layers") == 0) cfg.train.layers = 5;
    }

    try {
        if (app.got_subcommand(ingest)) {
            echo_config(cfg, app);
            cmd_ingest(cfg);
        } else if (app.got_subcommand(selectk)) {
            echo_config(cfg, app);
            cmd_select_k(cfg);
        } else if (app.got_subcommand(cluster_cmd)) {
            echo_config(cfg, app);
            const std::size_t k = cfg.fixed_k ? cfg.fixed_k : chosen_k_from_workspace(cfg);
            cmd_cluster(cfg, k);
        } else if (app.got_subcommand(train_cmd)) {
            echo_config(cfg, app);
            cmd_train(cfg);
        } else if (app.got_subcommand(generate)) {
            echo_config(cfg, app);
            cmd_generate(cfg);
        } else if (app.got_subcommand(evaluate)) {
            Dataset real = load_dataset_csv(eval_real);
            Dataset synth = load_dataset_csv(eval_synth);
            const fs::path out_dir =
                eval_out.empty() ? ws_path(cfg, "reports") : fs::path(eval_out);
            evaluate_datasets(real, synth, out_dir, eval_label, cfg.bins, cfg.max_lag, cfg.svg);
        } else if (app.got_subcommand(pipeline)) {
            echo_config(cfg, app);
            cmd_pipeline(cfg);
        } else if (app.got_subcommand(fixture)) {
            cmd_fixture(fixture_spec, fixture_out, fixture_format, fixture_seed);
        }
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
