#pragma once

#include "support.hpp"

namespace hdcast::cli {

void add_data_commands(CLI::App &app, Io io);
void add_model_commands(CLI::App &app, Io io);
void add_evaluation_commands(CLI::App &app, Io io);

} // namespace hdcast::cli
