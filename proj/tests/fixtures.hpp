#pragma once

#include <string>

#include "cursedsig/experiment.hpp"
#include "cursedsig/game_io.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(CURSEDSIG_DATA_DIR) + "/" + name;
}

inline cursedsig::GameFile beerquiche() {
  return cursedsig::load_game_file(data_path("beerquiche.json"));
}

inline cursedsig::GameFile kmn_file() { return cursedsig::load_game_file(data_path("kmn.json")); }

}  // namespace fixtures
