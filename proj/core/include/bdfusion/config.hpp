#pragma once

#include "bdfusion/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace bdfusion::config {

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse(std::istream& in);
KeyValues load(const std::filesystem::path& path);

/// Applies recognized keys on top of `base`. Unknown keys are an error.
///
/// Keys: functional_set, pca, pca_variance, tree_select, tree_n_trees,
/// tree_max_depth, tree_min_leaf, tree_seed, zscore, l2, model, C_grid,
/// gamma_grid, alpha_grid, C, C_weighted, gamma, alpha, fusion, fallback,
/// seed, dirichlet_draws, folds, stratified, classes.
///
/// Lists are comma separated; `alpha_grid` also accepts `start:step:stop`.
/// Setting any of C, C_weighted, gamma, alpha fixes the training parameters
/// (unset ones take the first grid value).
pipeline::PipelineConfig apply(const KeyValues& kv, pipeline::PipelineConfig base = {});

/// Every key with its effective value, for echoing into reports.
KeyValues describe(const pipeline::PipelineConfig& cfg);

/// Writes describe(cfg) in the same text format parse() reads.
std::string to_text(const pipeline::PipelineConfig& cfg);

}  // namespace bdfusion::config
