// Command-line surface for authoring, executing, rendering, classifying,
// and reporting on logic sketches.
//
// Exit codes: 0 success, 1 diagnostics or validation failure, 2 I/O or
// transport failure.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lsp/eval.hpp"
#include "lsp/inference.hpp"
#include "lsp/prompts.hpp"
#include "lsp/sketch.hpp"

namespace {

using namespace lsp;

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

SketchDocument load_sketch_or_fail(const std::string& path) {
    SketchParseResult parsed = parse_sketch_file(path);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) {
            std::cerr << path << ":" << d.to_string() << "\n";
        }
        throw Error("sketch check failed");
    }
    return std::move(*parsed.document);
}

void check_task_kind(const SketchDocument& doc, int task) {
    const bool relation = doc.meta.kind == TaskKind::relation;
    if (relation != (task == 2)) {
        throw Error("sketch '" + doc.name + "' is a " +
                    (relation ? std::string("relation") : std::string("sentence")) +
                    " sketch but --task is " + std::to_string(task));
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

Strategy parse_strategy(const std::string& name) {
    if (name == "lsp") return Strategy::lsp;
    if (name == "zero-shot") return Strategy::zero_shot;
    if (name == "brief") return Strategy::brief;
    if (name == "cot") return Strategy::cot;
    if (name == "meta") return Strategy::meta_compiler;
    throw Error("unknown strategy '" + name + "'");
}

RenderedPrompt render_for(Strategy strategy, const SketchDocument* doc,
                          const TaskInstance& instance) {
    switch (strategy) {
        case Strategy::lsp: {
            if (!doc) throw Error("--strategy lsp needs --sketch");
            const auto [pos, neg] = default_exemplars();
            return render_lsp_prompt(*doc, instance, pos, neg);
        }
        case Strategy::zero_shot: return render_zero_shot(instance);
        case Strategy::brief: return render_brief(instance);
        case Strategy::cot: return render_cot(instance);
        case Strategy::meta_compiler: throw Error("meta strategy does not classify");
    }
    throw Error("unreachable strategy");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"logic sketch toolkit"};
    app.require_subcommand(1);
    std::function<void()> action;

    // check
    auto* check = app.add_subcommand("check", "parse and statically check a sketch");
    auto check_sketch = std::make_shared<std::string>();
    check->add_option("--sketch", *check_sketch, "sketch file")->required();
    check->callback([check_sketch, &action] {
        action = [check_sketch] { load_sketch_or_fail(*check_sketch); };
    });

    // run
    auto* run = app.add_subcommand("run", "execute a sketch over a dataset");
    struct RunOpts {
        std::string sketch, data, out, scorer = "jaccard";
        int task = 1, jobs = 1;
    };
    auto run_opts = std::make_shared<RunOpts>();
    run->add_option("--sketch", run_opts->sketch)->required();
    run->add_option("--data", run_opts->data)->required();
    run->add_option("--task", run_opts->task)->check(CLI::IsMember({1, 2}))->required();
    run->add_option("--out", run_opts->out)->required();
    run->add_option("--jobs", run_opts->jobs)->check(CLI::PositiveNumber);
    run->add_option("--scorer", run_opts->scorer)->check(CLI::IsMember({"jaccard"}));
    run->callback([run_opts, &action] {
        action = [run_opts] {
            const SketchDocument doc = load_sketch_or_fail(run_opts->sketch);
            check_task_kind(doc, run_opts->task);
            const auto items = load_dataset(run_opts->data, run_opts->task);
            JaccardScorer scorer;
            PredictionSet set = run_corpus(doc, to_instances(items), scorer, run_opts->jobs);
            write_predictions(run_opts->out, set);
        };
    });

    // render
    auto* render = app.add_subcommand("render", "emit a prompt for one instance");
    struct RenderOpts {
        std::string strategy, sketch, sentence, drug, effect, prompt, out;
    };
    auto render_opts = std::make_shared<RenderOpts>();
    render->add_option("--strategy", render_opts->strategy)
        ->check(CLI::IsMember({"lsp", "zero-shot", "brief", "cot", "meta"}))
        ->required();
    render->add_option("--sketch", render_opts->sketch);
    render->add_option("--sentence", render_opts->sentence);
    render->add_option("--drug", render_opts->drug);
    render->add_option("--effect", render_opts->effect);
    render->add_option("--prompt", render_opts->prompt, "input prompt for --strategy meta");
    render->add_option("--out", render_opts->out, "output file (default: stdout)");
    render->callback([render_opts, &action] {
        action = [render_opts] {
            const Strategy strategy = parse_strategy(render_opts->strategy);
            RenderedPrompt rendered;
            if (strategy == Strategy::meta_compiler) {
                rendered = render_compiler_metaprompt(render_opts->prompt);
            } else {
                TaskInstance instance;
                instance.id = "cli";
                instance.sentence = render_opts->sentence;
                if (!render_opts->drug.empty()) instance.drug = render_opts->drug;
                if (!render_opts->effect.empty()) instance.effect = render_opts->effect;
                SketchDocument doc;
                const bool needs_sketch = strategy == Strategy::lsp;
                if (needs_sketch) doc = load_sketch_or_fail(render_opts->sketch);
                rendered = render_for(strategy, needs_sketch ? &doc : nullptr, instance);
            }
            if (render_opts->out.empty()) std::cout << rendered.text;
            else write_text(render_opts->out, rendered.text);
        };
    });

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "send rendered prompts to a backend");
    struct ClassifyOpts {
        std::string data, out, strategy, backend, sketch, model = "default";
        std::string stub_text = "{\"label\": 0, \"evidence\": \"\"}";
        int task = 1, jobs = 4, max_tokens = 256;
        double temperature = 0.0;
        bool keep_raw = false, strict = false;
    };
    auto cls = std::make_shared<ClassifyOpts>();
    classify_cmd->add_option("--data", cls->data)->required();
    classify_cmd->add_option("--task", cls->task)->check(CLI::IsMember({1, 2}))->required();
    classify_cmd->add_option("--strategy", cls->strategy)
        ->check(CLI::IsMember({"lsp", "zero-shot", "brief", "cot"}))
        ->required();
    classify_cmd->add_option("--backend", cls->backend)
        ->check(CLI::IsMember({"http", "oracle", "stub"}))
        ->required();
    classify_cmd->add_option("--sketch", cls->sketch);
    classify_cmd->add_option("--out", cls->out)->required();
    classify_cmd->add_option("--model", cls->model, "model name for the http payload");
    classify_cmd->add_option("--stub-text", cls->stub_text);
    classify_cmd->add_option("--jobs", cls->jobs)->check(CLI::PositiveNumber);
    classify_cmd->add_option("--max-tokens", cls->max_tokens)->check(CLI::PositiveNumber);
    classify_cmd->add_option("--temperature", cls->temperature);
    classify_cmd->add_flag("--keep-raw", cls->keep_raw);
    classify_cmd->add_flag("--strict-determinism", cls->strict);
    classify_cmd->callback([cls, &action] {
        action = [cls] {
            DecodingConfig config;
            config.temperature = cls->temperature;
            config.max_output_tokens = cls->max_tokens;
            config.strict_determinism = cls->strict;

            const Strategy strategy = parse_strategy(cls->strategy);
            const bool needs_sketch = strategy == Strategy::lsp || cls->backend == "oracle";
            SketchDocument doc;
            if (needs_sketch) {
                if (cls->sketch.empty()) throw Error("--sketch is required here");
                doc = load_sketch_or_fail(cls->sketch);
                check_task_kind(doc, cls->task);
            }

            std::unique_ptr<Backend> backend;
            if (cls->backend == "stub") {
                backend = std::make_unique<StubBackend>(cls->stub_text);
            } else if (cls->backend == "oracle") {
                backend = std::make_unique<SketchOracleBackend>(
                    doc, std::make_shared<JaccardScorer>());
            } else {
                backend = HttpBackend::from_environment(cls->model);
            }

            const auto items = load_dataset(cls->data, cls->task);
            std::vector<std::pair<std::string, RenderedPrompt>> prompts;
            prompts.reserve(items.size());
            const SketchDocument* doc_ptr = strategy == Strategy::lsp ? &doc : nullptr;
            for (const auto& instance : to_instances(items)) {
                prompts.emplace_back(instance.id, render_for(strategy, doc_ptr, instance));
            }

            PredictionSet set =
                classify_corpus(*backend, prompts, config, cls->jobs, cls->keep_raw);
            set.method = cls->strategy;
            write_predictions(cls->out, set);
        };
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "metrics with bootstrap CIs for one run");
    struct EvalOpts {
        std::string pred, data, out, method, model = "-";
        int task = 1, resamples = 1000;
        std::uint64_t seed = 0;
        bool seed_set = false;
    };
    auto ev = std::make_shared<EvalOpts>();
    eval_cmd->add_option("--pred", ev->pred)->required();
    eval_cmd->add_option("--data", ev->data)->required();
    eval_cmd->add_option("--task", ev->task)->check(CLI::IsMember({1, 2}))->required();
    eval_cmd->add_option("--seed", ev->seed, "bootstrap seed (mandatory, no default)")
        ->required();
    eval_cmd->add_option("--resamples", ev->resamples)->check(CLI::PositiveNumber);
    eval_cmd->add_option("--method", ev->method);
    eval_cmd->add_option("--model", ev->model);
    eval_cmd->add_option("--out", ev->out, "write the JSON report here");
    eval_cmd->callback([ev, &action] {
        action = [ev] {
            const auto gold = load_dataset(ev->data, ev->task);
            PredictionSet pred = read_predictions(ev->pred);
            pred.method = ev->method.empty() ? file_stem(ev->pred) : ev->method;
            pred.model = ev->model;
            const MetricsReport report = build_report({pred}, gold, ev->seed, ev->resamples);
            std::cout << report_to_table(report);
            if (!ev->out.empty()) write_text(ev->out, report_to_json(report));
        };
    });

    // mcnemar
    auto* mc = app.add_subcommand("mcnemar", "paired comparison of two prediction files");
    struct McOpts {
        std::string pred_a, pred_b, data;
        int task = 1;
    };
    auto mo = std::make_shared<McOpts>();
    mc->add_option("--pred-a", mo->pred_a)->required();
    mc->add_option("--pred-b", mo->pred_b)->required();
    mc->add_option("--data", mo->data)->required();
    mc->add_option("--task", mo->task)->check(CLI::IsMember({1, 2}))->required();
    mc->callback([mo, &action] {
        action = [mo] {
            const auto gold = load_dataset(mo->data, mo->task);
            const McNemarResult r =
                mcnemar(gold, read_predictions(mo->pred_a), read_predictions(mo->pred_b));
            char line[160];
            std::snprintf(line, sizeof line, "n01=%zu n10=%zu chi2=%.6f p=%.6g\n", r.n01,
                          r.n10, r.chi2, r.p_value);
            std::cout << line;
        };
    });

    // report
    auto* rep = app.add_subcommand("report", "metrics and all pairwise McNemar comparisons");
    struct ReportOpts {
        std::vector<std::string> preds, names, models;
        std::string data, out, table;
        int task = 1, resamples = 1000;
        std::uint64_t seed = 0;
    };
    auto ro = std::make_shared<ReportOpts>();
    rep->add_option("--pred", ro->preds, "prediction file (repeatable)")->required();
    rep->add_option("--name", ro->names, "method name per --pred (default: file stem)");
    rep->add_option("--model", ro->models, "model name per --pred (default: '-')");
    rep->add_option("--data", ro->data)->required();
    rep->add_option("--task", ro->task)->check(CLI::IsMember({1, 2}))->required();
    rep->add_option("--seed", ro->seed, "bootstrap seed (mandatory, no default)")->required();
    rep->add_option("--resamples", ro->resamples)->check(CLI::PositiveNumber);
    rep->add_option("--out", ro->out, "write the JSON report here");
    rep->add_option("--table", ro->table, "write the text table here");
    rep->callback([ro, &action] {
        action = [ro] {
            if (!ro->names.empty() && ro->names.size() != ro->preds.size()) {
                throw Error("--name count must match --pred count");
            }
            if (!ro->models.empty() && ro->models.size() != ro->preds.size()) {
                throw Error("--model count must match --pred count");
            }
            const auto gold = load_dataset(ro->data, ro->task);
            std::vector<PredictionSet> runs;
            for (std::size_t i = 0; i < ro->preds.size(); ++i) {
                PredictionSet set = read_predictions(ro->preds[i]);
                set.method = ro->names.empty() ? file_stem(ro->preds[i]) : ro->names[i];
                set.model = ro->models.empty() ? "-" : ro->models[i];
                runs.push_back(std::move(set));
            }
            const MetricsReport report = build_report(runs, gold, ro->seed, ro->resamples);
            std::cout << report_to_table(report);
            if (!ro->out.empty()) write_text(ro->out, report_to_json(report));
            if (!ro->table.empty()) write_text(ro->table, report_to_table(report));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        action();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    return run_cli(argc, argv);
}
