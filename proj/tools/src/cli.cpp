#include "cli.hpp"

#include "commands.hpp"

#include "hdcast/parallel.hpp"

#include <algorithm>
#include <ostream>

namespace hdcast::cli {

namespace {

std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

// Turns a --config JSON object into flags placed before the user's own, so
// the command line wins under take-last.
std::vector<std::string> config_tokens(const std::string &path) {
    const Json cfg = load_json(path);
    if (!cfg.is_object()) throw DataError(path + ": config must be a JSON object");
    std::vector<std::string> tokens;
    for (const auto &[key, value] : cfg.items()) {
        if (key == "command") continue;
        const std::string flag = flag_name(key);
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_string()) {
            if (value.get<std::string>().empty()) continue;
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(value.dump());
        } else if (value.is_null()) {
            continue;
        } else {
            throw DataError(path + ": config value for '" + key + "' must be a string, number or boolean");
        }
    }
    return tokens;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string &a) { return !a.starts_with("-"); });
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t width = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            width = 2;
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            width = 1;
        } else {
            continue;
        }
        if (sub == args.end()) throw CLI::CallForHelp();
        const auto sub_pos = static_cast<std::size_t>(sub - args.begin());
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + width));
        const auto tokens = config_tokens(path);
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1), tokens.begin(), tokens.end());
        break;
    }
    return args;
}

} // namespace

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Housing demand index modelling and forecasting", "hdcast"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Cap on worker threads (0 = hardware)")->capture_default_str();
    const Io io{out, err};
    add_data_commands(app, io);
    add_model_commands(app, io);
    add_evaluation_commands(app, io);
    for (auto *sub : app.get_subcommands({})) {
        sub->add_option("--config", "JSON file of option values; command-line flags override it");
        sub->add_option("--threads", threads, "Cap on worker threads (0 = hardware)")->capture_default_str();
    }
    app.parse_complete_callback([&] { set_max_threads(threads); });

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(args);
        return kExitOk;
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << '\n';
        if (const auto *sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << "run 'hdcast " << sub->get_name() << " --help' for usage\n";
        } else {
            err << "run 'hdcast --help' for usage\n";
        }
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace hdcast::cli
