#pragma once

// JSON model files.
//
// EPRB model:
//   {"kind": "eprb", "cards": [n1, n2, n3, n4], "weights": [...]}
// with weights in EprbModel's row-major atom order.
//
// Pairwise common-cause model, either explicit
//   {"kind": "pairwise", "atoms": [...], "weights": [...],
//    "A": [atom labels], "B": [atom labels], "C": [[atom labels], ...]}
// or per cell, four weights (AB, A~B, ~AB, ~A~B) for each cell in turn:
//   {"kind": "pairwise", "cells": n, "weights": [4n values]}

#include <string>

#include "json.hpp"
#include "weakch/common_cause.hpp"
#include "weakch/eprb_model.hpp"

namespace weakch {

/// Throws BadModelFile for missing or malformed fields.
EprbModel eprb_model_from_json(const nlohmann::json& j);
PairwiseCcModel pairwise_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EprbModel& m);

/// Reads and parses a file. Throws BadModelFile if it cannot be read or parsed.
nlohmann::json read_json_file(const std::string& path);

EprbModel load_eprb_model(const std::string& path);

}  // namespace weakch
