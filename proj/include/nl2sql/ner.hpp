#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "nl2sql/subprocess.hpp"
#include "nl2sql/values.hpp"

namespace nl2sql {

// External recognizer over the line protocol: request {"question": ...},
// response {"entities": [{"text", "start", "end", "type"}]}. A timeout or
// malformed response returns nullopt and extraction falls back to
// heuristics only.
class ProcessEntityRecognizer : public EntityRecognizer {
public:
    explicit ProcessEntityRecognizer(const std::string& command,
                                     std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

    std::optional<std::vector<Entity>> recognize(const std::string& question) override;

private:
    std::unique_ptr<LineProcess> process_;
    std::chrono::milliseconds timeout_;
};

}  // namespace nl2sql
