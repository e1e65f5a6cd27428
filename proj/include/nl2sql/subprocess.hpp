#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace nl2sql {

// Child process speaking a line-delimited protocol over stdin/stdout.
// One instance per worker; not thread safe.
class LineProcess {
public:
    explicit LineProcess(const std::string& command);
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    bool running() const { return pid_ > 0; }

    // Writes one line (newline appended). Returns false on a broken pipe.
    bool write_line(const std::string& line);

    // Reads one line, waiting up to the deadline. nullopt on timeout or EOF.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout);

private:
    void close_all();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace nl2sql
