#ifndef COREPRUNE_TOOLS_CLI_HPP
#define COREPRUNE_TOOLS_CLI_HPP

// Command-line front end: train, compress, sweep, eval, lowerbound.
//
// Exit status: 0 success, 2 usage or config error, 3 data error, 4 numeric
// failure. Every output file is written to a temporary name and renamed on
// success.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <coreprune/coreprune.hpp>

namespace coreprune::cli {

namespace fs = std::filesystem;

inline constexpr int exit_usage = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_numeric = 4;

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw invalid_parameter("empty entry in list '" + text + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw invalid_parameter("empty list");
    return out;
}

inline std::size_t parse_count(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty() || s[0] == '-')
        throw invalid_parameter(what + ": '" + s + "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline double parse_real(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw invalid_parameter(what + ": '" + s + "' is not a number");
    return v;
}

inline std::vector<std::size_t> parse_counts(const std::string& text, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(text)) out.push_back(parse_count(s, what));
    return out;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) out.push_back(parse_real(s, what));
    return out;
}

/// "a:b:step" (inclusive range) or a comma list.
inline std::vector<std::size_t> parse_sizes(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_counts(text, "sizes");
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw invalid_parameter("sizes range must be first:last:step");
    const auto first = parse_count(parts[0], "sizes"), last = parse_count(parts[1], "sizes"),
               step = parse_count(parts[2], "sizes");
    if (step == 0 || first == 0 || first > last) throw invalid_parameter("bad sizes range '" + text + "'");
    std::vector<std::size_t> out;
    for (std::size_t m = first; m <= last; m += step) out.push_back(m);
    return out;
}

inline scheme_kind parse_scheme_or_throw(const std::string& s) {
    const auto k = parse_scheme(s);
    if (!k) throw invalid_parameter("unknown scheme '" + s + "'");
    return *k;
}

inline activation parse_activation(const std::string& name, std::optional<double> param) {
    const auto kind = activation::parse_kind(name);
    if (!kind) throw invalid_parameter("unknown activation '" + name + "'");
    return activation::make(*kind, param);
}

inline mnist_layout require_dataset(const std::string& dir) {
    if (dir.empty()) throw invalid_parameter("dataset not found: no --data directory given");
    mnist_layout layout{fs::path(dir)};
    for (const auto& f : layout.files())
        if (!fs::is_regular_file(f)) throw invalid_parameter("dataset not found: " + f.string());
    return layout;
}

inline std::string format_real(double v, int precision = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

/// Flat JSON object -> "--key value" tokens. Arrays join with commas; true
/// booleans become bare flags; false and null are dropped.
inline std::vector<std::string> config_to_args(const nlohmann::json& doc) {
    if (!doc.is_object()) throw invalid_parameter("config must be a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, value] : doc.items()) {
        const std::string flag = "--" + key;
        const auto scalar = [&key](const nlohmann::json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number()) return v.dump();
            throw invalid_parameter("config key '" + key + "' has an unsupported value");
        };
        if (value.is_null()) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
            continue;
        }
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
            out.push_back(flag);
            out.push_back(joined);
            continue;
        }
        out.push_back(flag);
        out.push_back(scalar(value));
    }
    return out;
}

inline std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    return path;
}

}  // namespace detail

struct global_options {
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
};

struct train_options {
    std::string data;
    std::string hidden = "300,100";
    std::string act = "relu";
    std::optional<double> act_param;
    std::size_t epochs = 15;
    double lr = 0.1;
    std::size_t batch = 32;
};

struct compress_options {
    std::string model;
    std::string data;
    std::string m;
    std::string epsilon;
    std::string beta;
    std::string scheme = "coreset";
    std::string direction = "bottom_up";
    double c = 1.0;
    double delta = 0.1;
    bool fine_tune = false;
    bool ablation = false;
    std::size_t runs = 5;
    double lr = 0.01;
    std::size_t batch = 32;
    std::size_t max_epochs = 20;
    std::size_t holdout = 5000;
};

struct sweep_options {
    std::string source = "gaussian";
    std::string model;
    std::size_t layer = 0;
    std::optional<std::size_t> consumer;
    std::size_t n = 1000;
    std::size_t d = 784;
    std::string schemes = "coreset,uniform,percentile";
    std::string sizes = "50:1000:50";
    std::size_t runs = 10;
    std::size_t queries = 100;
    std::string data;
    std::string act = "relu";
    std::optional<double> act_param;
    std::optional<double> beta;
};

struct eval_options {
    std::string original;
    std::string pruned;
    std::string data;
    std::size_t queries = 0;
};

struct lowerbound_options {
    std::size_t n = 0;
    std::size_t d = 0;
    double alpha = 1.0;
    double beta = 1.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void write_output(const global_options& g, const fs::path& fallback, const std::string& content,
                         std::ostream& out) {
    const fs::path target = g.out.empty() ? fallback : fs::path(g.out);
    if (target.empty()) return;
    write_file_atomic(target, content);
    out << "wrote " << target.string() << '\n';
}

inline int cmd_train(const global_options& g, const train_options& o, std::ostream& out) {
    const auto layout = require_dataset(o.data);
    const auto train = load_idx(layout.train_images, layout.train_labels);
    const auto test = load_idx(layout.test_images, layout.test_labels);
    std::vector<std::size_t> widths{train.dimension()};
    if (o.hidden != "none")
        for (auto w : parse_counts(o.hidden, "hidden")) widths.push_back(w);
    widths.push_back(static_cast<std::size_t>(train.classes));
    const auto act = parse_activation(o.act, o.act_param);
    const fs::path target = g.out.empty() ? fs::path("model.json") : fs::path(g.out);

    auto net = make_network(widths, act, derive_seed(g.seed, 0));
    const sgd_params hp{o.lr, o.batch, o.epochs, derive_seed(g.seed, 1)};
    net = train_sgd(std::move(net), train, hp, [&out](std::size_t e, double loss) {
        out << "epoch " << e + 1 << " loss " << format_real(loss) << '\n';
    });
    out << "parameters " << net.parameter_count() << '\n';
    out << "test accuracy " << format_real(accuracy(net, test)) << '\n';
    write_file_atomic(target, model_to_json(net).dump(1) + "\n");
    out << "wrote " << target.string() << '\n';
    return 0;
}

inline prune_config make_prune_config(const global_options& g, const compress_options& o) {
    prune_config cfg;
    if (o.m.empty() == o.epsilon.empty()) throw invalid_parameter("give exactly one of --m and --epsilon");
    if (!o.m.empty()) cfg.per_layer_m = parse_counts(o.m, "m");
    if (!o.epsilon.empty()) cfg.per_layer_epsilon = parse_reals(o.epsilon, "epsilon");
    if (!o.beta.empty()) cfg.per_layer_beta = parse_reals(o.beta, "beta");
    cfg.scheme = parse_scheme_or_throw(o.scheme);
    if (o.direction == "bottom_up")
        cfg.direction = prune_direction::bottom_up;
    else if (o.direction == "top_down")
        cfg.direction = prune_direction::top_down;
    else
        throw invalid_parameter("unknown direction '" + o.direction + "'");
    cfg.seed = g.seed;
    cfg.c = o.c;
    cfg.delta = o.delta;
    return cfg;
}

inline int cmd_compress(const global_options& g, const compress_options& o, std::ostream& out) {
    auto cfg = make_prune_config(g, o);
    if ((o.fine_tune || o.ablation) && o.data.empty())
        throw invalid_parameter("dataset not found: --fine-tune and --ablation need --data");
    std::optional<dataset> train, val, test;
    if (!o.data.empty()) {
        const auto layout = require_dataset(o.data);
        auto full = load_idx(layout.train_images, layout.train_labels);
        test = load_idx(layout.test_images, layout.test_labels);
        if (o.fine_tune || o.ablation) {
            auto [t, v] = holdout_split(full, std::min(o.holdout, full.size() / 2));
            train = std::move(t);
            val = std::move(v);
        }
    }
    const auto net = load_model(o.model);
    const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    const sgd_params hp{o.lr, o.batch, 0, derive_seed(g.seed, 0xF17E)};
    const convergence_rule rule{0.0005, 2, o.max_epochs};

    if (o.ablation) {
        std::ostringstream csv;
        csv.precision(17);
        csv << "scheme,run,seed,params_after,accuracy_before_finetune,accuracy_after_finetune,finetune_epochs\n";
        for (const auto scheme : {scheme_kind::coreset, scheme_kind::uniform}) {
            double sum_before = 0.0, sum_after = 0.0;
            for (std::size_t r = 0; r < o.runs; ++r) {
                auto run_cfg = cfg;
                run_cfg.scheme = scheme;
                run_cfg.seed = derive_seed(g.seed, r);
                const auto pruned = prune_network(net, run_cfg);
                const double before = accuracy(pruned.net, *test);
                auto ft_hp = hp;
                ft_hp.seed = derive_seed(run_cfg.seed, 0xF17E);
                const auto tuned = fine_tune(pruned.net, *train, *val, ft_hp, rule);
                const double after = accuracy(tuned.net, *test);
                sum_before += before;
                sum_after += after;
                csv << scheme_name(scheme) << ',' << r << ',' << run_cfg.seed << ','
                    << pruned.report.params_after << ',' << before << ',' << after << ',' << tuned.epochs
                    << '\n';
            }
            out << scheme_name(scheme) << " mean accuracy before fine-tune "
                << format_real(sum_before / static_cast<double>(o.runs)) << " after "
                << format_real(sum_after / static_cast<double>(o.runs)) << '\n';
        }
        fs::create_directories(dir);
        write_file_atomic(dir / "ablation.csv", csv.str());
        out << "wrote " << (dir / "ablation.csv").string() << '\n';
        return 0;
    }

    auto result = prune_network(net, cfg);
    if (test) out << "accuracy before " << format_real(accuracy(net, *test)) << '\n';
    if (test) out << "accuracy after pruning " << format_real(accuracy(result.net, *test)) << '\n';
    if (o.fine_tune) {
        auto tuned = fine_tune(std::move(result.net), *train, *val, hp, rule);
        result.net = std::move(tuned.net);
        out << "fine-tuned for " << tuned.epochs << " epochs\n";
        out << "accuracy after fine-tuning " << format_real(accuracy(result.net, *test)) << '\n';
    }
    out << "parameters " << result.report.params_before << " -> " << result.report.params_after << '\n';
    out << "compression ratio " << format_real(result.report.compression_ratio()) << '\n';
    fs::create_directories(dir);
    write_file_atomic(dir / "pruned_model.json", model_to_json(result.net).dump(1) + "\n");
    write_file_atomic(dir / "report.csv", report_to_csv(result.report));
    out << "wrote " << (dir / "pruned_model.json").string() << " and " << (dir / "report.csv").string() << '\n';
    return 0;
}

inline Eigen::MatrixXd image_queries(const dataset& test, std::size_t count) {
    const std::size_t q = count == 0 ? test.size() : std::min(count, test.size());
    return test.inputs.leftCols(static_cast<Eigen::Index>(q));
}

inline int cmd_sweep(const global_options& g, const sweep_options& o, std::ostream& out) {
    sweep_spec spec;
    for (const auto& s : split_list(o.schemes)) spec.schemes.push_back(parse_scheme_or_throw(s));
    spec.sizes = parse_sizes(o.sizes);
    spec.runs = o.runs;
    spec.seed = derive_seed(g.seed, 2);
    std::optional<dataset> test;
    if (!o.data.empty()) {
        const auto layout = require_dataset(o.data);
        test = load_idx(layout.test_images, layout.test_labels);
    }
    const std::string query_label = test ? "mnist_test" : "unit_ball";
    if (o.queries == 0 && !test) throw invalid_parameter("--queries must be >= 1 without --data");

    std::optional<weighted_set> set;
    Eigen::MatrixXd queries;
    std::string source_label;
    if (o.source == "gaussian" || o.source == "uniform") {
        const auto dist = o.source == "gaussian" ? weight_distribution::gaussian : weight_distribution::uniform;
        source_label = o.source + "_weights";
        set = synthetic_source(dist, o.n, o.d, derive_seed(g.seed, 1));
        spec.act = parse_activation(o.act, o.act_param);
        spec.beta = o.beta.value_or(1.0);
        queries = test ? image_queries(*test, o.queries) : unit_ball_queries(o.queries, o.d, derive_seed(g.seed, 3));
        if (test && static_cast<std::size_t>(queries.rows()) != o.d)
            throw dimension_mismatch("--d " + std::to_string(o.d) + " does not match image dimension " +
                                     std::to_string(queries.rows()));
    } else if (o.source == "model") {
        source_label = "model_layer";
        if (o.model.empty()) throw invalid_parameter("--source model needs --model");
        const auto net = load_model(o.model);
        set = model_layer_source(net, o.layer, o.consumer);
        const auto& layer = net.layer(o.layer);
        if (!layer.act) throw not_prunable("layer " + std::to_string(o.layer) + " has no activation");
        spec.act = *layer.act;
        const double beta = o.beta.value_or(default_beta(net, o.layer));
        spec.beta = augmented_radius(beta);
        const Eigen::MatrixXd raw =
            test && o.layer == 0 ? image_queries(*test, o.queries)
                                 : unit_ball_queries(o.queries == 0 ? 100 : o.queries, layer.in_units(),
                                                     derive_seed(g.seed, 3), beta);
        if (test && o.layer != 0) out << "note: image queries apply to layer 0 only; using ball queries\n";
        queries = augment_queries(raw);
    } else {
        throw invalid_parameter("unknown source '" + o.source + "' (gaussian, uniform, model)");
    }
    const std::string label = test && !(o.source == "model" && o.layer != 0) ? query_label : "unit_ball";
    const auto records = run_sweep(*set, queries, spec);
    for (const auto& r : records)
        out << r.scheme << " m=" << r.m << " mean " << r.mean_error << " std " << r.std_error << '\n';
    write_output(g, "sweep.csv", sweep_to_csv(records, source_label, label), out);
    return 0;
}

inline int cmd_eval(const global_options& g, const eval_options& o, std::ostream& out) {
    const auto original = load_model(o.original);
    const auto pruned = load_model(o.pruned);
    nlohmann::json doc;
    Eigen::MatrixXd queries;
    if (!o.data.empty()) {
        const auto layout = require_dataset(o.data);
        const auto test = load_idx(layout.test_images, layout.test_labels);
        queries = image_queries(test, o.queries);
        const double a0 = accuracy(original, test), a1 = accuracy(pruned, test);
        out << "accuracy original " << format_real(a0) << '\n';
        out << "accuracy pruned " << format_real(a1) << '\n';
        doc["accuracy_original"] = a0;
        doc["accuracy_pruned"] = a1;
        doc["queries"] = "mnist_test";
    } else {
        queries = unit_ball_queries(o.queries == 0 ? 1000 : o.queries, original.input_size(), derive_seed(g.seed, 3));
        doc["queries"] = "unit_ball";
    }
    const double l1 = network_l1_error(original, pruned, queries);
    out << "l1 error " << l1 << '\n';
    doc["l1_error"] = l1;
    doc["query_count"] = queries.cols();
    doc["params_original"] = original.parameter_count();
    doc["params_pruned"] = pruned.parameter_count();
    if (!g.out.empty()) write_output(g, {}, doc.dump(1) + "\n", out);
    return 0;
}

inline int cmd_lowerbound(const global_options& g, const lowerbound_options& o, std::ostream& out) {
    const auto inst = make_sphere_instance(o.n, o.d, o.alpha, o.seed);
    rng gen(derive_seed(o.seed, 1));
    const std::size_t drop = gen.index(o.n);
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < o.n; ++j)
        if (j != drop) subset.push_back(j);
    const auto cert =
        verify_no_multiplicative_coreset(inst, activation::relu(), subset, std::vector<double>(subset.size(), 1.0), o.beta);
    out << "instance: n=" << o.n << " d=" << o.d << " alpha=" << o.alpha << " beta=" << o.beta
        << " seed=" << o.seed << '\n';
    out << "points on the sphere |p| = alpha with last coordinate alpha/2\n";
    out << "subset: all points except index " << cert.excluded_index << ", unit weights\n";
    out << "relative error at the excluded point's query: " << format_real(cert.excluded_relative_error, 12)
        << '\n';
    out << "worst relative error over all " << o.n << " queries: " << format_real(cert.worst_relative_error, 12)
        << " (query " << cert.worst_query << ")\n";
    out << "no epsilon < 1 multiplicative guarantee holds for this proper subset\n";
    if (!g.out.empty()) {
        nlohmann::json doc{{"n", o.n},
                           {"d", o.d},
                           {"alpha", o.alpha},
                           {"beta", o.beta},
                           {"seed", o.seed},
                           {"excluded_index", cert.excluded_index},
                           {"excluded_relative_error", cert.excluded_relative_error},
                           {"worst_relative_error", cert.worst_relative_error},
                           {"worst_query", cert.worst_query}};
        write_output(g, {}, doc.dump(1) + "\n", out);
    }
    return 0;
}

inline int exit_code(const error& e) {
    switch (e.category()) {
        case error_category::usage: return exit_usage;
        case error_category::data: return exit_data;
        case error_category::numeric: return exit_numeric;
    }
    return 1;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    if (args.empty()) args.push_back("coreprune");

    CLI::App app{"Coreset-based neural pruning toolkit", "coreprune"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();

    global_options g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out", g.out, "Output path (file or directory, per subcommand)");
    app.add_option("--config", g.config, "JSON object of flag values; explicit flags override it");

    train_options to;
    auto* train = app.add_subcommand("train", "Train a dense network on MNIST-format IDX data");
    train->add_option("--data", to.data, "Directory with the four IDX files");
    train->add_option("--hidden", to.hidden, "Hidden widths, comma separated, or 'none'")->capture_default_str();
    train->add_option("--activation", to.act, "Hidden activation")->capture_default_str();
    train->add_option("--activation-param", to.act_param, "Soft-clip steepness");
    train->add_option("--epochs", to.epochs)->capture_default_str();
    train->add_option("--lr", to.lr)->capture_default_str();
    train->add_option("--batch", to.batch)->capture_default_str();

    compress_options co;
    auto* compress = app.add_subcommand("compress", "Prune every hidden layer of a model");
    compress->add_option("--model", co.model, "Model file")->required();
    compress->add_option("--data", co.data, "Directory with the four IDX files");
    compress->add_option("--m", co.m, "Per-layer sample sizes, comma separated");
    compress->add_option("--epsilon", co.epsilon, "Per-layer epsilon (sample size from the bound)");
    compress->add_option("--beta", co.beta, "Per-layer query radius, comma separated");
    compress->add_option("--scheme", co.scheme, "coreset, uniform, percentile, l1, l2, l1l2")->capture_default_str();
    compress->add_option("--direction", co.direction, "bottom_up or top_down")->capture_default_str();
    compress->add_option("--c", co.c, "Constant of the sample-size bound")->capture_default_str();
    compress->add_option("--delta", co.delta, "Failure probability of the bound")->capture_default_str();
    compress->add_flag("--fine-tune", co.fine_tune, "Fine-tune after pruning until validation accuracy stalls");
    compress->add_flag("--ablation", co.ablation, "Compare coreset and uniform selection with fine-tuning");
    compress->add_option("--runs", co.runs, "Ablation runs per scheme")->capture_default_str();
    compress->add_option("--lr", co.lr, "Fine-tuning learning rate")->capture_default_str();
    compress->add_option("--batch", co.batch)->capture_default_str();
    compress->add_option("--max-epochs", co.max_epochs, "Fine-tuning epoch cap")->capture_default_str();
    compress->add_option("--holdout", co.holdout, "Training samples held out for validation")->capture_default_str();

    sweep_options so;
    auto* sweep = app.add_subcommand("sweep", "Single-neuron error versus coreset size");
    sweep->add_option("--source", so.source, "gaussian, uniform or model")->capture_default_str();
    sweep->add_option("--model", so.model, "Model file for --source model");
    sweep->add_option("--layer", so.layer)->capture_default_str();
    sweep->add_option("--consumer", so.consumer, "Single next-layer neuron (default: all)");
    sweep->add_option("--n", so.n, "Synthetic point count")->capture_default_str();
    sweep->add_option("--d", so.d, "Synthetic dimension")->capture_default_str();
    sweep->add_option("--schemes", so.schemes)->capture_default_str();
    sweep->add_option("--sizes", so.sizes, "first:last:step or comma list")->capture_default_str();
    sweep->add_option("--runs", so.runs)->capture_default_str();
    sweep->add_option("--queries", so.queries, "Query count (0 = all test images)")->capture_default_str();
    sweep->add_option("--data", so.data, "Use MNIST test images as queries");
    sweep->add_option("--activation", so.act)->capture_default_str();
    sweep->add_option("--activation-param", so.act_param);
    sweep->add_option("--beta", so.beta, "Query radius for the sensitivities");

    eval_options eo;
    auto* eval = app.add_subcommand("eval", "Compare two models on the same queries");
    eval->add_option("--original", eo.original)->required();
    eval->add_option("--pruned", eo.pruned)->required();
    eval->add_option("--data", eo.data, "Use MNIST test images as queries and report accuracy");
    eval->add_option("--queries", eo.queries, "Query count (0 = all)")->capture_default_str();

    lowerbound_options lo;
    auto* lower = app.add_subcommand("lowerbound", "Certify that no proper subset is a multiplicative coreset");
    lower->add_option("n", lo.n)->required();
    lower->add_option("d", lo.d)->required();
    lower->add_option("alpha", lo.alpha)->required();
    lower->add_option("beta", lo.beta)->required();
    lower->add_option("seed", lo.seed)->required();

    try {
        if (const auto path = detail::find_config_path(args)) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(read_file(*path));
            } catch (const nlohmann::json::exception& e) {
                throw invalid_parameter("config " + *path + ": " + e.what());
            } catch (const std::exception& e) {
                throw invalid_parameter("config " + *path + ": " + e.what());
            }
            if (!doc.is_object()) throw invalid_parameter("config must be a JSON object");
            nlohmann::json global = nlohmann::json::object(), local = nlohmann::json::object();
            for (const auto& [key, value] : doc.items())
                (key == "seed" || key == "out" ? global : local)[key] = value;
            // Config values go before the matching explicit flags so the latter win.
            std::size_t at = 1;
            for (std::size_t i = 1; i < args.size(); ++i)
                if (args[i] == "train" || args[i] == "compress" || args[i] == "sweep" || args[i] == "eval" ||
                    args[i] == "lowerbound") {
                    at = i + 1;
                    break;
                }
            const auto local_args = detail::config_to_args(local);
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), local_args.begin(), local_args.end());
            const auto global_args = detail::config_to_args(global);
            args.insert(args.begin() + 1, global_args.begin(), global_args.end());
        }
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_code(e);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*train) return detail::cmd_train(g, to, out);
        if (*compress) return detail::cmd_compress(g, co, out);
        if (*sweep) return detail::cmd_sweep(g, so, out);
        if (*eval) return detail::cmd_eval(g, eo, out);
        if (*lower) return detail::cmd_lowerbound(g, lo, out);
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_code(e);
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}

}  // namespace coreprune::cli

#endif  // COREPRUNE_TOOLS_CLI_HPP
