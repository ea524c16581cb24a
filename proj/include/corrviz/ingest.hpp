#pragma once

#include <string>

#include "corrviz/stats.hpp"

namespace corrviz::ingest {

using stats::DataSet;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

enum class Format { json, csv };

/// Validates an already-assembled dataset: consistent lengths, strictly
/// increasing x, positive variances, PSD covariance within tolerance.
void validate(const DataSet& dataset);

DataSet load_dataset(const std::string& text, Format format);
DataSet load_dataset_file(const std::string& path);

std::string save_dataset(const DataSet& dataset, Format format);
void save_dataset_file(const DataSet& dataset, const std::string& path);

}  // namespace corrviz::ingest
