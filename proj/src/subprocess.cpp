#include "nl2sql/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>

namespace nl2sql {

LineProcess::LineProcess(const std::string& command) {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0) return;
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        return;
    }
    pid_t pid = fork();
    if (pid < 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        return;
    }
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    fcntl(from_child_, F_SETFL, O_NONBLOCK);
}

LineProcess::~LineProcess() { close_all(); }

void LineProcess::close_all() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        kill(pid_, SIGTERM);
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

bool LineProcess::write_line(const std::string& line) {
    if (to_child_ < 0) return false;
    std::string payload = line + "\n";
    std::size_t written = 0;
    while (written < payload.size()) {
        ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
        if (n <= 0) return false;
        written += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> LineProcess::read_line(std::chrono::milliseconds timeout) {
    if (from_child_ < 0) return std::nullopt;
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        auto newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            return line;
        }
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) return std::nullopt;
        auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        struct pollfd pfd {
            from_child_, POLLIN, 0
        };
        int rc = poll(&pfd, 1, static_cast<int>(remaining));
        if (rc <= 0) return std::nullopt;
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n <= 0) return std::nullopt;  // EOF or error
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace nl2sql
