#pragma once

#include <string>
#include <vector>

#include "nl2sql/schema.hpp"

namespace nl2sql::fixtures {

struct DevSample {
    std::string question;
    std::string gold_sql;
    std::string db_id;
    int literal_count = 0;       // ground truth by construction
    bool expect_accept = true;   // converter should produce a tree
};

// Handwritten development set over the fixture databases, covering the SQL
// surface the grammar expresses plus a few deliberate rejections.
const std::vector<DevSample>& dev_samples();

// 7,000-question training split whose per-query literal counts follow the
// target distribution 0:3469 1:2494 2:945 3:62 4:30 by construction.
std::vector<DevSample> train_samples();

void write_samples_file(const std::string& path, const std::vector<DevSample>& samples);

std::vector<SampleRecord> as_records(const std::vector<DevSample>& samples);

}  // namespace nl2sql::fixtures
