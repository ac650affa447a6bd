// voxmask: speaker anonymization and privacy/utility evaluation for speech
// corpora. Subcommands: anonymize, evaluate, report, ensemble, trials.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "voxmask/manifest.hpp"
#include "voxmask/pipeline.hpp"
#include "voxmask/privacy.hpp"
#include "voxmask/report.hpp"

using namespace voxmask;

namespace {

struct AnonymizeArgs {
    std::string manifest;
    std::string out_dir = "anonymized";
    std::string method = "pitch";
    std::string name;
    double step = 4.0;
    int lpc_order = 20;
    double alpha = 0.8;
    std::string backend_cmd;
    std::string gender_policy = "raise_male_lower_female";
    int workers = 1;
};

struct EvaluateArgs {
    std::string manifest;
    std::string configs;
    std::string out_dir = "eval";
    std::uint64_t seed = 42;
    int workers = 1;
    int max_impostor = 8;
    bool dump_contours = false;
};

int run_anonymize(const AnonymizeArgs& args) {
    AnonymizerConfig config;
    if (args.method == "pitch")
        config.method = AnonymizeMethod::kPitch;
    else if (args.method == "mcadams")
        config.method = AnonymizeMethod::kMcadams;
    else if (args.method == "external")
        config.method = AnonymizeMethod::kExternal;
    else
        throw std::runtime_error("unknown method '" + args.method + "'");
    config.name = args.name;
    config.semitone_step = args.step;
    config.lpc_order = args.lpc_order;
    config.mcadams_alpha = args.alpha;
    config.backend_command = args.backend_cmd;
    config.gender_policy = args.gender_policy == "fixed_direction" || args.gender_policy == "fixed"
                               ? GenderPolicy::kFixedDirection
                               : GenderPolicy::kRaiseMaleLowerFemale;
    config.validate();

    const auto manifest = load_manifest(args.manifest);
    std::vector<BatchRecord> records(manifest.size());
    for (std::size_t i = 0; i < manifest.size(); ++i)
        records[i] = {manifest[i].id, manifest[i].wav_path, manifest[i].gender};

    const auto items = anonymize_batch(records, config, args.out_dir, args.workers);
    int failures = 0;
    for (const auto& item : items) {
        if (item.ok) {
            std::cout << item.id << " -> " << item.output_path << "\n";
        } else {
            ++failures;
            std::cerr << item.id << " FAILED: " << item.error << "\n";
        }
    }
    std::cout << items.size() - failures << "/" << items.size() << " utterances anonymized\n";
    return 0;  // per-utterance failures are reported, not fatal
}

int run_evaluate(const EvaluateArgs& args) {
    const auto manifest = load_manifest(args.manifest);
    const auto configs = load_config_grid(args.configs);
    PipelineOptions options;
    options.seed = args.seed;
    options.workers = args.workers;
    options.max_impostor_per_enroll = args.max_impostor;
    options.dump_contours = args.dump_contours;

    const auto report = run_pipeline(manifest, configs, args.out_dir, options);
    const std::string base = args.out_dir + "/report";
    save_report_json(report, base + ".json");
    emit_report(report, ReportFormat::kCsv, base + ".csv");
    emit_report(report, ReportFormat::kMarkdown, base + ".md");
    std::cout << render_report(report, ReportFormat::kMarkdown);
    std::cout << "report written to " << base << ".{json,csv,md}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speaker anonymization and evaluation toolkit"};
    app.require_subcommand(1);

    AnonymizeArgs anon;
    auto* cmd_anon = app.add_subcommand("anonymize", "anonymize a manifest of wav files");
    cmd_anon->add_option("--manifest", anon.manifest, "manifest CSV/JSONL")->required();
    cmd_anon->add_option("--out-dir", anon.out_dir, "output directory");
    cmd_anon->add_option("--method", anon.method, "pitch | mcadams | external");
    cmd_anon->add_option("--name", anon.name, "override the method label");
    cmd_anon->add_option("--step", anon.step, "semitone step magnitude");
    cmd_anon->add_option("--lpc-order", anon.lpc_order, "LPC order for mcadams");
    cmd_anon->add_option("--alpha", anon.alpha, "pole-angle exponent for mcadams");
    cmd_anon->add_option("--backend-cmd", anon.backend_cmd,
                         "external command with {input}/{output} placeholders");
    cmd_anon->add_option("--gender-policy", anon.gender_policy,
                         "raise_male_lower_female | fixed_direction");
    cmd_anon->add_option("--workers", anon.workers, "parallel workers");

    EvaluateArgs eval;
    auto* cmd_eval = app.add_subcommand("evaluate", "run the full evaluation pipeline");
    cmd_eval->add_option("--manifest", eval.manifest, "manifest CSV/JSONL")->required();
    cmd_eval->add_option("--configs", eval.configs, "config grid JSON/CSV")->required();
    cmd_eval->add_option("--out-dir", eval.out_dir, "output directory");
    cmd_eval->add_option("--seed", eval.seed, "trial sampling seed");
    cmd_eval->add_option("--workers", eval.workers, "parallel workers");
    cmd_eval->add_option("--max-impostor", eval.max_impostor, "impostor trials per enrollment");
    cmd_eval->add_flag("--dump-contours", eval.dump_contours, "write per-utterance contour CSVs");

    std::string report_in, report_out, report_format = "markdown";
    auto* cmd_report = app.add_subcommand("report", "re-render a saved report.json");
    cmd_report->add_option("--in", report_in, "report.json from evaluate")->required();
    cmd_report->add_option("--out", report_out, "output file (stdout when omitted)");
    cmd_report->add_option("--format", report_format, "markdown | csv");

    std::string ens_a, ens_b, ens_labels;
    auto* cmd_ens = app.add_subcommand("ensemble", "average two prediction files");
    cmd_ens->add_option("--a", ens_a, "prediction CSV id,probability[,label]")->required();
    cmd_ens->add_option("--b", ens_b, "prediction CSV id,probability[,label]")->required();
    cmd_ens->add_option("--labels", ens_labels, "optional id,label CSV");

    std::string trials_manifest, trials_out, trials_scores;
    int trials_max_impostor = 8;
    std::uint64_t trials_seed = 42;
    auto* cmd_trials = app.add_subcommand("trials", "export verification trials / score them");
    cmd_trials->add_option("--manifest", trials_manifest, "manifest CSV/JSONL");
    cmd_trials->add_option("--out", trials_out, "trial list CSV to write");
    cmd_trials->add_option("--scores", trials_scores,
                           "scored trials CSV enroll_id,test_id,label,score: print its EER");
    cmd_trials->add_option("--max-impostor", trials_max_impostor, "impostor trials per enrollment");
    cmd_trials->add_option("--seed", trials_seed, "impostor sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_anon) return run_anonymize(anon);
        if (*cmd_eval) return run_evaluate(eval);
        if (*cmd_report) {
            const auto report = load_report_json(report_in);
            const auto format =
                report_format == "csv" ? ReportFormat::kCsv : ReportFormat::kMarkdown;
            if (report_out.empty())
                std::cout << render_report(report, format);
            else
                emit_report(report, format, report_out);
            return 0;
        }
        if (*cmd_ens) {
            const std::optional<std::string> labels =
                ens_labels.empty() ? std::nullopt : std::optional<std::string>(ens_labels);
            const auto summary = ensemble_command(ens_a, ens_b, labels);
            std::printf("accuracy_a        %.3f\n", summary.accuracy_a);
            std::printf("accuracy_b        %.3f\n", summary.accuracy_b);
            std::printf("accuracy_ensemble %.3f\n", summary.accuracy_ensemble);
            return 0;
        }
        if (*cmd_trials) {
            if (!trials_scores.empty()) {
                const auto eer = compute_eer(load_score_csv(trials_scores));
                std::printf("EER %.4f at threshold %.4f\n", eer.eer, eer.threshold);
                return 0;
            }
            if (trials_manifest.empty() || trials_out.empty())
                throw std::runtime_error("trials needs --manifest and --out (or --scores)");
            const auto manifest = load_manifest(trials_manifest);
            std::vector<TrialRecord> records(manifest.size());
            for (std::size_t i = 0; i < manifest.size(); ++i)
                records[i] = {manifest[i].id, manifest[i].speaker_id};
            const auto trials = build_trials(records, trials_max_impostor, trials_seed);
            write_trials_csv(trials, trials_out);
            std::cout << trials.genuine_count() << " genuine + " << trials.impostor_count()
                      << " impostor trials -> " << trials_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
