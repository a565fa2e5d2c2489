#pragma once

#include <string>
#include <vector>

#include "cursedsig/game.hpp"
#include "cursedsig/solver.hpp"

namespace cursedsig {

/// A game file together with the support specs it declares for the
/// mixed-equilibrium solver.
struct GameFile {
  SignalingGame game;
  std::vector<SupportSpec> support_specs;
};

/// Loads and validates a game JSON document. Parse errors carry line and
/// column; semantic errors carry the JSON path of the offending field.
GameFile load_game_file(const std::string& path);
GameFile parse_game_json(const std::string& text, const std::string& origin);

/// Loads an assessment (strategies, beliefs, chi) for `verify`.
Assessment load_assessment(const std::string& path, const SignalingGame& game);
Assessment parse_assessment_json(const std::string& text, const std::string& origin,
                                 const SignalingGame& game);

std::string read_text_file(const std::string& path);

}  // namespace cursedsig
