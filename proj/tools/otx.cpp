// Command-line front end: simulate / extract / evaluate / ot solve.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "otx/classifier.hpp"
#include "otx/cost.hpp"
#include "otx/datamodel.hpp"
#include "otx/io.hpp"
#include "otx/kernels.hpp"
#include "otx/labeling.hpp"
#include "otx/metrics.hpp"
#include "otx/ot.hpp"
#include "otx/pipeline.hpp"
#include "otx/simkit.hpp"
#include "otx/weighting.hpp"

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

otx::WeightScheme parse_weighting(const std::string& name) {
    if (name == "effective") return otx::WeightScheme::kEffectiveNumber;
    if (name == "icf") return otx::WeightScheme::kInverseFrequency;
    return otx::WeightScheme::kUniform;
}

otx::CostMetric parse_cost(const std::string& name) {
    return name == "euclidean" ? otx::CostMetric::kEuclidean : otx::CostMetric::kCosine;
}

struct SimulateArgs {
    int classes = 10;
    int dim = 32;
    long long head = 500;
    double imbalance = 100.0;
    double eta = 0.5;
    std::string noise = "joint";
    double separation = 10.0;
    double within_std = 1.0;
    int test_per_class = 50;
    int asym_target = -1;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    otx::SimSpec spec;
    spec.num_classes = args.classes;
    spec.dim = args.dim;
    spec.head_count = args.head;
    spec.imbalance_factor = args.imbalance;
    spec.cluster_separation = args.separation;
    spec.within_class_std = args.within_std;
    spec.eta = args.eta;
    spec.test_per_class = args.test_per_class;
    spec.rng_seed = args.seed;
    if (args.noise == "joint") spec.noise_model = otx::NoiseModel::kJoint;
    else if (args.noise == "sym") spec.noise_model = otx::NoiseModel::kSymmetric;
    else spec.noise_model = otx::NoiseModel::kAsymmetric;
    if (args.asym_target >= 0) spec.asym_target = args.asym_target;

    otx::SimulatedData data = otx::simulate(spec);

    std::filesystem::create_directories(args.out);
    auto path = [&](const char* name) { return (std::filesystem::path(args.out) / name).string(); };
    otx::write_embeddings(path("train_embeddings.otsb"), data.train);
    otx::write_labels_csv(path("train_labels.csv"), data.train.ids(),
                          data.train_labels.observed(), data.train_labels.truth());
    otx::write_embeddings(path("test_embeddings.otsb"), data.test);
    otx::write_labels_csv(path("test_labels.csv"), data.test.ids(),
                          data.test_labels.observed(), data.test_labels.truth());

    std::vector<long long> truth_counts =
        otx::class_counts(data.train_labels.truth(), spec.num_classes);
    std::vector<long long> observed_counts =
        otx::class_counts(data.train_labels.observed(), spec.num_classes);
    json echo = {
        {"command", "simulate"},
        {"classes", args.classes},
        {"dim", args.dim},
        {"head", args.head},
        {"if", args.imbalance},
        {"eta", args.eta},
        {"noise", args.noise},
        {"sep", args.separation},
        {"std", args.within_std},
        {"test_per_class", args.test_per_class},
        {"seed", args.seed},
        {"out", args.out},
        {"train_size", data.train.size()},
        {"truth_counts", truth_counts},
        {"observed_counts", observed_counts},
    };
    std::cout << echo.dump() << "\n";
    return 0;
}

struct ExtractArgs {
    std::string embeddings;
    std::string labels;
    std::string test_embeddings;
    std::string test_labels;
    std::string out;
    int classes = 0;
    int epochs = 100;
    int batch_size = 128;
    double alpha = 0.9;
    double beta = 0.95;
    double icf_r = 1.0;
    std::string weighting = "effective";
    std::string cost = "cosine";
    std::string update_counts = "on";
    double gamma = 1e-2;
    int sinkhorn_iters = 1000;
    double sinkhorn_tol = 1e-9;
    int clf_epochs = 200;
    double clf_step = 0.0;
    double clf_l2 = 1e-4;
    int threads = 0;
    std::uint64_t seed = 0;
};

json config_echo(const ExtractArgs& args, int num_classes) {
    return json{
        {"command", "extract"},       {"embeddings", args.embeddings},
        {"labels", args.labels},      {"test_embeddings", args.test_embeddings},
        {"test_labels", args.test_labels}, {"out", args.out},
        {"classes", num_classes},     {"epochs", args.epochs},
        {"batch_size", args.batch_size}, {"alpha", args.alpha},
        {"beta", args.beta},          {"icf_r", args.icf_r},
        {"weighting", args.weighting}, {"cost", args.cost},
        {"update_counts", args.update_counts}, {"gamma", args.gamma},
        {"sinkhorn_iters", args.sinkhorn_iters}, {"sinkhorn_tol", args.sinkhorn_tol},
        {"clf_epochs", args.clf_epochs}, {"clf_step", args.clf_step},
        {"clf_l2", args.clf_l2},      {"threads", args.threads},
        {"seed", args.seed},
    };
}

otx::EmbeddingSet load_dataset(const std::string& emb_path, const otx::LabelFile& labels) {
    otx::EmbeddingSet raw = otx::read_embeddings(emb_path);
    if (labels.ids.size() != raw.size()) {
        throw otx::DimensionMismatch("label file has " + std::to_string(labels.ids.size()) +
                                     " rows for " + std::to_string(raw.size()) + " embeddings");
    }
    return otx::EmbeddingSet(labels.ids, raw.features());
}

int cmd_extract(const ExtractArgs& args) {
    if (args.threads > 0) otx::kernels::set_threads(args.threads);

    otx::LabelFile label_file = otx::read_labels_csv(args.labels);
    int num_classes = otx::infer_num_classes(label_file, args.classes);
    otx::EmbeddingSet train = load_dataset(args.embeddings, label_file);
    otx::LabelTable labels(label_file.observed, label_file.truth, num_classes);

    std::optional<otx::EmbeddingSet> test;
    std::optional<otx::LabelTable> test_labels;
    if (!args.test_embeddings.empty()) {
        otx::LabelFile test_file = otx::read_labels_csv(args.test_labels);
        test = load_dataset(args.test_embeddings, test_file);
        test_labels = otx::LabelTable(test_file.observed, test_file.truth, num_classes);
    }

    otx::PipelineConfig cfg;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.alpha = args.alpha;
    cfg.beta = args.beta;
    cfg.icf_r = args.icf_r;
    cfg.weighting = parse_weighting(args.weighting);
    cfg.cost = parse_cost(args.cost);
    cfg.update_counts_from_subset = args.update_counts == "on";
    cfg.rng_seed = args.seed;
    cfg.sinkhorn.gamma = args.gamma;
    cfg.sinkhorn.max_iterations = args.sinkhorn_iters;
    cfg.sinkhorn.tolerance = args.sinkhorn_tol;
    cfg.classifier.epochs = args.clf_epochs;
    cfg.classifier.step = args.clf_step;
    cfg.classifier.l2 = args.clf_l2;

    otx::PipelineResult result =
        otx::run_pipeline(train, labels, test ? &*test : nullptr,
                          test_labels ? &*test_labels : nullptr, cfg);

    std::filesystem::create_directories(args.out);
    std::filesystem::path out_dir(args.out);

    std::ofstream report((out_dir / "report.jsonl").string(), std::ios::trunc);
    if (!report) throw otx::IoError("cannot open report.jsonl for writing");
    report << json{{"config", config_echo(args, num_classes)}}.dump() << "\n";
    for (const otx::EpochReport& r : result.reports) {
        json line = {
            {"epoch", r.epoch},
            {"subset_size", r.subset_size},
            {"imbalance_factor", opt_json(r.imbalance_factor)},
            {"noise_ratio", opt_json(r.noise_ratio)},
            {"precision", opt_json(r.precision)},
            {"recall", opt_json(r.recall)},
            {"accuracy", opt_json(r.accuracy)},
            {"macro_auc", opt_json(r.macro_auc)},
            {"test_accuracy", opt_json(r.test_accuracy)},
            {"prototype_drift", r.prototype_drift},
        };
        report << line.dump() << "\n";
    }

    std::vector<std::uint8_t> kept(train.size(), 0);
    for (std::size_t row : result.final_subset.kept_rows) kept[row] = 1;
    otx::write_subset_csv((out_dir / "subset.csv").string(), train.ids(),
                          result.final_subset.pseudo_labels, kept);

    const otx::EpochReport& last = result.reports.back();
    json summary = {
        {"epochs", result.reports.size()},
        {"subset_size", last.subset_size},
        {"imbalance_factor", opt_json(last.imbalance_factor)},
        {"noise_ratio", opt_json(last.noise_ratio)},
        {"test_accuracy", opt_json(last.test_accuracy)},
    };
    std::cout << summary.dump() << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string subset;
    std::string labels;
    int classes = 0;
    long long shot_many_above = 100;
    long long shot_few_below = 20;
};

int cmd_evaluate(const EvaluateArgs& args) {
    otx::SubsetFile subset = otx::read_subset_csv(args.subset);
    otx::LabelFile label_file = otx::read_labels_csv(args.labels);
    if (!label_file.truth) {
        throw otx::MissingTruth("evaluate needs a label file with a truth column");
    }
    if (label_file.ids != subset.ids) {
        throw otx::DimensionMismatch("subset and label files disagree on sample ids");
    }
    int num_classes = otx::infer_num_classes(label_file, args.classes);
    const std::vector<int>& truth = *label_file.truth;

    std::vector<int> kept_labels, kept_truth;
    for (std::size_t i = 0; i < subset.ids.size(); ++i) {
        if (!subset.kept[i]) continue;
        kept_labels.push_back(subset.pseudo_labels[i]);
        kept_truth.push_back(truth[i]);
    }
    std::vector<long long> kept_counts = otx::class_counts(kept_labels, num_classes);

    json out = {
        {"config",
         {{"command", "evaluate"},
          {"subset", args.subset},
          {"labels", args.labels},
          {"classes", num_classes},
          {"shot_many_above", args.shot_many_above},
          {"shot_few_below", args.shot_few_below}}},
        {"total_size", subset.ids.size()},
        {"subset_size", kept_labels.size()},
        {"per_class_counts", kept_counts},
        {"noise_ratio", otx::noise_ratio(kept_labels, kept_truth)},
    };
    if (!kept_labels.empty()) {
        otx::ImbalanceResult imb = otx::imbalance_factor(kept_counts);
        out["imbalance_factor"] = imb.value;
        out["excluded_classes"] = imb.excluded_classes;
    } else {
        out["imbalance_factor"] = nullptr;
        out["excluded_classes"] = json::array();
    }

    // Pseudo-label agreement metrics over the full table. The subset file
    // carries hard labels only, so the ranking AUC is not recomputable here;
    // per-epoch values live in the extract report.
    std::size_t hits = 0;
    std::vector<long long> tp(static_cast<std::size_t>(num_classes), 0);
    std::vector<long long> truth_count(static_cast<std::size_t>(num_classes), 0);
    std::vector<long long> pred_count(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t i = 0; i < subset.ids.size(); ++i) {
        int p = subset.pseudo_labels[i];
        int t = truth[i];
        if (p == t) ++hits;
        ++truth_count[static_cast<std::size_t>(t)];
        ++pred_count[static_cast<std::size_t>(p)];
        if (p == t) ++tp[static_cast<std::size_t>(t)];
    }
    double precision_sum = 0.0, recall_sum = 0.0;
    int present = 0;
    for (int c = 0; c < num_classes; ++c) {
        auto uc = static_cast<std::size_t>(c);
        if (truth_count[uc] == 0) continue;
        ++present;
        precision_sum += pred_count[uc] > 0
                             ? static_cast<double>(tp[uc]) / static_cast<double>(pred_count[uc])
                             : 0.0;
        recall_sum += static_cast<double>(tp[uc]) / static_cast<double>(truth_count[uc]);
    }
    out["pseudo_accuracy"] = static_cast<double>(hits) / static_cast<double>(subset.ids.size());
    out["pseudo_precision"] = present > 0 ? json(precision_sum / present) : json(nullptr);
    out["pseudo_recall"] = present > 0 ? json(recall_sum / present) : json(nullptr);
    out["macro_auc"] = nullptr;

    std::vector<double> kept_as_values(kept_counts.begin(), kept_counts.end());
    otx::ShotReport shots = otx::shot_partition_report(
        kept_as_values, otx::class_counts(truth, num_classes),
        otx::ShotThresholds{args.shot_many_above, args.shot_few_below});
    out["shot_mean_kept"] = {{"many", opt_json(shots.many)},
                             {"medium", opt_json(shots.medium)},
                             {"few", opt_json(shots.few)}};

    std::cout << out.dump(2) << "\n";
    return 0;
}

struct OtSolveArgs {
    std::string cost;
    std::string row_marginal;
    std::string col_marginal;
    std::string out;
    double gamma = 1e-2;
    int iters = 1000;
    double tol = 1e-9;
    bool naive = false;
};

int cmd_ot_solve(const OtSolveArgs& args) {
    otx::Matrix cost = otx::read_matrix_csv(args.cost);
    std::vector<double> a, b;
    if (!args.row_marginal.empty()) {
        a = otx::read_vector_file(args.row_marginal);
    } else {
        a.assign(cost.rows(), 1.0 / static_cast<double>(cost.rows()));
    }
    if (!args.col_marginal.empty()) {
        b = otx::read_vector_file(args.col_marginal);
    } else {
        b.assign(cost.cols(), 1.0 / static_cast<double>(cost.cols()));
    }
    otx::SinkhornConfig cfg;
    cfg.gamma = args.gamma;
    cfg.max_iterations = args.iters;
    cfg.tolerance = args.tol;
    cfg.stabilized = !args.naive;
    otx::TransportPlan plan = otx::sinkhorn(cost, a, b, cfg);
    otx::PlanObjective obj = otx::plan_objective(plan, cost);

    json info = {
        {"command", "ot solve"},
        {"gamma", cfg.gamma},
        {"iterations_used", plan.iterations_used},
        {"marginal_violation", plan.marginal_violation},
        {"converged", plan.converged},
        {"transport_cost", obj.transport_cost},
        {"entropy", obj.entropy},
        {"objective", obj.regularized_objective},
    };
    std::cerr << info.dump() << "\n";

    if (!args.out.empty()) {
        otx::write_matrix_csv(args.out, plan.plan);
    } else {
        char buf[64];
        for (std::size_t i = 0; i < plan.plan.rows(); ++i) {
            for (std::size_t j = 0; j < plan.plan.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", plan.plan(i, j));
                std::cout << (j ? "," : "") << buf;
            }
            std::cout << "\n";
        }
    }
    if (!plan.converged) {
        std::cerr << "warning: did not reach tolerance " << cfg.tolerance << " within "
                  << cfg.max_iterations << " iterations, residual " << plan.marginal_violation
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clean, class-balanced subset extraction via entropic optimal transport"};
    app.set_config("--config", "", "flat key=value file mirroring the long flag names");
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a synthetic noisy long-tailed dataset");
    sim_cmd->add_option("--classes", sim.classes, "number of classes")->capture_default_str();
    sim_cmd->add_option("--dim", sim.dim, "feature dimension")->capture_default_str();
    sim_cmd->add_option("--head", sim.head, "head class sample count")->capture_default_str();
    sim_cmd->add_option("--if", sim.imbalance, "imbalance factor N1/NK")->capture_default_str();
    sim_cmd->add_option("--eta", sim.eta, "noise ratio")->capture_default_str();
    sim_cmd->add_option("--noise", sim.noise, "noise model")
        ->check(CLI::IsMember({"joint", "sym", "asym"}))
        ->capture_default_str();
    sim_cmd->add_option("--sep", sim.separation, "cluster separation in within-class stds")
        ->capture_default_str();
    sim_cmd->add_option("--std", sim.within_std, "within-class standard deviation")
        ->capture_default_str();
    sim_cmd->add_option("--test-per-class", sim.test_per_class, "balanced test samples per class")
        ->capture_default_str();
    sim_cmd->add_option("--asym-target", sim.asym_target,
                        "target class for asymmetric noise, default smallest");
    sim_cmd->add_option("--seed", sim.seed, "rng seed")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "output directory")->required();

    ExtractArgs ext;
    CLI::App* ext_cmd = app.add_subcommand("extract", "run the extraction pipeline");
    ext_cmd->add_option("--embeddings", ext.embeddings, "training OTSB file")->required();
    ext_cmd->add_option("--labels", ext.labels, "training label CSV")->required();
    ext_cmd->add_option("--test-embeddings", ext.test_embeddings, "balanced test OTSB file");
    ext_cmd->add_option("--test-labels", ext.test_labels, "test label CSV")
        ->needs("--test-embeddings");
    ext_cmd->add_option("--out", ext.out, "output directory")->required();
    ext_cmd->add_option("--classes", ext.classes, "class count override, default inferred");
    ext_cmd->add_option("--epochs", ext.epochs, "extraction epochs")->capture_default_str();
    ext_cmd->add_option("--batch-size", ext.batch_size, "mini-batch size")->capture_default_str();
    ext_cmd->add_option("--alpha", ext.alpha, "prototype EMA factor")->capture_default_str();
    ext_cmd->add_option("--beta", ext.beta, "effective-number smoothing")->capture_default_str();
    ext_cmd->add_option("--icf-r", ext.icf_r, "inverse-frequency exponent")->capture_default_str();
    ext_cmd->add_option("--weighting", ext.weighting, "prototype weighting scheme")
        ->check(CLI::IsMember({"effective", "icf", "uniform"}))
        ->capture_default_str();
    ext_cmd->add_option("--cost", ext.cost, "cost metric")
        ->check(CLI::IsMember({"cosine", "euclidean"}))
        ->capture_default_str();
    ext_cmd->add_option("--update-counts", ext.update_counts,
                        "refresh support counts from each subset")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    ext_cmd->add_option("--gamma", ext.gamma, "entropic regularization")->capture_default_str();
    ext_cmd->add_option("--sinkhorn-iters", ext.sinkhorn_iters, "sinkhorn iteration cap")
        ->capture_default_str();
    ext_cmd->add_option("--sinkhorn-tol", ext.sinkhorn_tol, "sinkhorn marginal tolerance")
        ->capture_default_str();
    ext_cmd->add_option("--clf-epochs", ext.clf_epochs, "classifier training steps")
        ->capture_default_str();
    ext_cmd->add_option("--clf-step", ext.clf_step, "classifier step size, 0 selects automatically")
        ->capture_default_str();
    ext_cmd->add_option("--clf-l2", ext.clf_l2, "classifier l2 penalty")->capture_default_str();
    ext_cmd->add_option("--threads", ext.threads, "worker thread cap, 0 keeps the runtime default")
        ->capture_default_str();
    ext_cmd->add_option("--seed", ext.seed, "rng seed")->capture_default_str();

    EvaluateArgs eva;
    CLI::App* eva_cmd = app.add_subcommand("evaluate", "score a subset CSV against truth labels");
    eva_cmd->add_option("--subset", eva.subset, "subset CSV from extract")->required();
    eva_cmd->add_option("--labels", eva.labels, "label CSV with a truth column")->required();
    eva_cmd->add_option("--classes", eva.classes, "class count override, default inferred");
    eva_cmd->add_option("--shot-many-above", eva.shot_many_above,
                        "many-shot threshold, count strictly above")
        ->capture_default_str();
    eva_cmd->add_option("--shot-few-below", eva.shot_few_below,
                        "few-shot threshold, count strictly below")
        ->capture_default_str();

    OtSolveArgs ots;
    CLI::App* ot_cmd = app.add_subcommand("ot", "optimal transport debugging");
    ot_cmd->require_subcommand(1);
    CLI::App* solve_cmd = ot_cmd->add_subcommand("solve", "solve one instance from CSV inputs");
    solve_cmd->add_option("--cost", ots.cost, "cost matrix CSV")->required();
    solve_cmd->add_option("--row-marginal", ots.row_marginal, "row marginal file, default uniform");
    solve_cmd->add_option("--col-marginal", ots.col_marginal, "column marginal file, default uniform");
    solve_cmd->add_option("--gamma", ots.gamma, "entropic regularization")->capture_default_str();
    solve_cmd->add_option("--sinkhorn-iters", ots.iters, "iteration cap")->capture_default_str();
    solve_cmd->add_option("--sinkhorn-tol", ots.tol, "marginal tolerance")->capture_default_str();
    solve_cmd->add_flag("--naive", ots.naive, "plain-domain updates instead of log-domain");
    solve_cmd->add_option("--out", ots.out, "plan CSV path, default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (ext_cmd->parsed()) return cmd_extract(ext);
        if (eva_cmd->parsed()) return cmd_evaluate(eva);
        if (ot_cmd->parsed() && solve_cmd->parsed()) return cmd_ot_solve(ots);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const otx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
