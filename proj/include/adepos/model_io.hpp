#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>

#include "adepos/ensemble.hpp"
#include "adepos/signal_features.hpp"

namespace adepos {

// Versioned JSON model documents. Doubles are written with shortest
// round-trip formatting, so a save/load cycle of the float path is
// bit-exact.

nlohmann::json learner_to_json(const BaseLearner& bl,
                               const std::optional<QuantParams>& quant = std::nullopt);
BaseLearner learner_from_json(const nlohmann::json& doc,
                              std::optional<QuantParams>* quant = nullptr);

nlohmann::json pool_to_json(const PhysicalPool& pool, const PairMap& map);
std::pair<PhysicalPool, PairMap> pool_from_json(const nlohmann::json& doc);

nlohmann::json ensemble_to_json(const Ensemble& ens,
                                const std::optional<QuantParams>& quant = std::nullopt);
Ensemble ensemble_from_json(const nlohmann::json& doc,
                            std::optional<QuantParams>* quant = nullptr);

void save_model(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json load_model(const std::filesystem::path& path);

} // namespace adepos
