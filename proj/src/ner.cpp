#include "nl2sql/ner.hpp"

#include <json.hpp>

namespace nl2sql {

using nlohmann::json;

ProcessEntityRecognizer::ProcessEntityRecognizer(const std::string& command,
                                                 std::chrono::milliseconds timeout)
    : process_(std::make_unique<LineProcess>(command)), timeout_(timeout) {}

std::optional<std::vector<EntityRecognizer::Entity>> ProcessEntityRecognizer::recognize(
    const std::string& question) {
    if (!process_->running()) return std::nullopt;
    json request;
    request["question"] = question;
    if (!process_->write_line(request.dump())) return std::nullopt;
    auto line = process_->read_line(timeout_);
    if (!line) return std::nullopt;
    std::vector<Entity> entities;
    try {
        json response = json::parse(*line);
        for (const json& e : response.at("entities")) {
            Entity entity;
            entity.text = e.at("text").get<std::string>();
            entity.start = e.at("start").get<std::size_t>();
            entity.end = e.at("end").get<std::size_t>();
            if (e.contains("type")) entity.type = e["type"].get<std::string>();
            entities.push_back(std::move(entity));
        }
    } catch (const json::exception&) {
        return std::nullopt;
    }
    return entities;
}

}  // namespace nl2sql
