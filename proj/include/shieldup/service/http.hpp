#pragma once

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include <httplib.h>

#include "shieldup/service/api.hpp"

namespace shieldup::service {

inline Request to_request(const httplib::Request& req) {
  Request r{req.method, req.path, req.body, {}};
  const std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view bearer = "Bearer ";
  if (auth.rfind(bearer, 0) == 0) r.token = auth.substr(bearer.size());
  return r;
}

inline void install_routes(httplib::Server& server, Service& service) {
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response out = service.handle(to_request(req));
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Get(R"(/.*)", dispatch);
  server.Post(R"(/.*)", dispatch);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  write_file(tmp, content);
  std::filesystem::rename(tmp, path);
}

// A service backed by a data directory: events.jsonl is the log,
// snapshot.json the latest folded trial state.
class ServiceHost {
 public:
  ServiceHost(const std::filesystem::path& corpus_dir, const std::filesystem::path& data_dir, ServiceConfig config,
              Clock clock = system_now)
      : data_dir_(data_dir) {
    std::filesystem::create_directories(data_dir_);
    Corpus corpus = load_corpus(corpus_dir);
    if (!corpus.failures.empty()) {
      const auto& f = corpus.failures.front();
      throw Error(f.code, f.file, f.message);
    }
    auto items = parse_sdat_items(read_file(corpus_dir / "sdat" / "items.json"));
    std::optional<TrialState> snapshot;
    if (std::filesystem::exists(snapshot_path())) {
      snapshot = snapshot_from_json(json::parse(read_file(snapshot_path())));
    }
    service_.emplace(std::move(corpus), std::move(items), std::move(config), EventLog::open(data_dir_ / "events.jsonl"),
                     std::move(clock), random_token, std::move(snapshot));
    service_->on_snapshot = [this](const json& s) { write_atomically(snapshot_path(), s.dump()); };
  }

  Service& service() { return *service_; }
  std::filesystem::path snapshot_path() const { return data_dir_ / "snapshot.json"; }

  void flush() { write_atomically(snapshot_path(), service_->snapshot().dump()); }

  // Serves until SIGTERM or SIGINT, then writes a final snapshot.
  int run(const std::string& host, int port) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGINT);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    httplib::Server server;
    install_routes(server, *service_);
    std::atomic<bool> stopping{false};
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      stopping = true;
      server.stop();
    });
    if (!server.bind_to_port(host, port)) {
      stopping = true;
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
      throw Error(Errc::InvalidConfig, "port", "cannot bind " + host + ":" + std::to_string(port));
    }
    std::cerr << "listening on " << host << ":" << port << "\n";
    server.listen_after_bind();
    if (!stopping.exchange(true)) pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    flush();
    return 0;
  }

 private:
  std::filesystem::path data_dir_;
  std::optional<Service> service_;
};

}  // namespace shieldup::service
