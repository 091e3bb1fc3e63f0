// Copyright 2026 The lightattack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "lightattack/bridge_client.hpp"
#include "lightattack/fixtures.hpp"

using namespace lightattack;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string conformance(const std::string& name) { return slurp(std::string(LIGHTATTACK_TESTDATA_DIR) + "/conformance/" + name); }

std::string bridge(const std::string& mode) { return std::string("exec:") + LIGHTATTACK_FAKE_BRIDGE + " " + mode; }

Image8 conformance_image()
{
    const auto scene = fixtures::to_scene(fixtures::named_scene("invariant"));
    return capture_ambient(scene, CameraSpec{}, 20261016);
}

} // namespace

TEST(Base64, KnownVectors)
{
    auto enc = [](const std::string& s) {
        return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    };
    EXPECT_EQ(enc(""), "");
    EXPECT_EQ(enc("f"), "Zg==");
    EXPECT_EQ(enc("fo"), "Zm8=");
    EXPECT_EQ(enc("foo"), "Zm9v");
    EXPECT_EQ(enc("foob"), "Zm9vYg==");
    EXPECT_EQ(enc("fooba"), "Zm9vYmE=");
    EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
    const auto dec = base64_decode("Zm9vYmE=");
    EXPECT_EQ(std::string(dec.begin(), dec.end()), "fooba");
    EXPECT_THROW(base64_decode("Zm9v!"), ProtocolViolation);
    EXPECT_THROW(base64_decode("Zm9"), ProtocolViolation);
}

TEST(Base64, RoundTripsAllLengths)
{
    SplitMix64 r(1);
    for (std::size_t n = 0; n < 70; ++n) {
        std::vector<std::uint8_t> v(n);
        for (auto& b : v)
            b = static_cast<std::uint8_t>(r.below(256));
        EXPECT_EQ(base64_decode(base64_encode(v)), v);
    }
}

TEST(Protocol, RequestMatchesConformanceFixtureByteForByte)
{
    EXPECT_EQ(encode_request(1, conformance_image()), conformance("request.ndjson"));
    const auto j = nlohmann::json::parse(conformance("request.ndjson"));
    EXPECT_EQ(read_ppm(base64_decode(j.at("ppm_b64").get<std::string>())), conformance_image());
    EXPECT_THROW(encode_request(1, Image8(16, 16)), WrongImageSize);
}

TEST(Protocol, ConformanceResponseDecodesToBuiltinScores)
{
    CentroidClassifier model(fixtures::builtin_model());
    const auto expected = model.classify(conformance_image());
    const auto got = decode_response(conformance("response.ndjson"), 1, 10);
    ASSERT_EQ(got.probs.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i)
        EXPECT_NEAR(got.probs[i], expected.probs[i], 1e-12);
    EXPECT_TRUE(is_normalized(got));
}

TEST(Protocol, FakeBridgeReproducesConformanceResponse)
{
    auto ch = open_channel(bridge("centroid"));
    ch->write_line(conformance("request.ndjson"));
    EXPECT_EQ(ch->read_line() + "\n", conformance("response.ndjson"));
}

TEST(Protocol, DecodeRejectsMalformedResponses)
{
    EXPECT_THROW(decode_response("not json", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"probs":[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":2,"probs":[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]})", 1, 10),
                 ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1,"error":"boom"})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1,"probs":[0.5,0.5]})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1,"probs":[1.1,-0.1,0,0,0,0,0,0,0,0]})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1,"probs":["a",0,0,0,0,0,0,0,0,1]})", 1, 10), ProtocolViolation);
    EXPECT_THROW(decode_response(R"({"id":1,"probs":[0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2]})", 1, 10),
                 NormalizationError);
}

TEST(Protocol, SmallDriftIsRenormalized)
{
    const auto s = decode_response(R"({"id":7,"probs":[0.10001,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]})", 7, 10);
    EXPECT_TRUE(is_normalized(s));
    EXPECT_GT(s.probs[0], s.probs[1]);
}

TEST(BridgeClassifier, UniformBridgeGivesTenths)
{
    BridgeClassifier c(bridge("uniform"));
    const auto s = c.classify(conformance_image());
    for (double p : s.probs)
        EXPECT_NEAR(p, 0.1, 1e-15);
    EXPECT_TRUE(is_normalized(s));
    // Several requests on one connection keep ids in step.
    for (int i = 0; i < 5; ++i)
        EXPECT_NO_THROW(c.classify(conformance_image()));
}

TEST(BridgeClassifier, CentroidBridgeAgreesWithInProcessModel)
{
    CentroidClassifier local(fixtures::builtin_model());
    BridgeClassifier remote(bridge("centroid"));
    const auto scene = fixtures::to_scene(fixtures::named_scene("susceptible"));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Image8 img = capture(scene, ProjectorSpec{}, pattern_white(), CameraSpec{}, seed);
        const auto a = local.classify(img), b = remote.classify(img);
        for (std::size_t i = 0; i < 10; ++i)
            EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
    }
}

TEST(BridgeClassifier, BrokenBridgesRaiseTheRightErrors)
{
    const Image8 img = conformance_image();
    EXPECT_THROW(BridgeClassifier(bridge("short")).classify(img), ProtocolViolation);
    EXPECT_THROW(BridgeClassifier(bridge("error")).classify(img), ProtocolViolation);
    EXPECT_THROW(BridgeClassifier(bridge("badjson")).classify(img), ProtocolViolation);
    EXPECT_THROW(BridgeClassifier(bridge("wrongid")).classify(img), ProtocolViolation);
    EXPECT_THROW(BridgeClassifier(bridge("unnormalized")).classify(img), NormalizationError);
    EXPECT_TRUE(is_normalized(BridgeClassifier(bridge("drift")).classify(img)));
    EXPECT_THROW(BridgeClassifier(bridge("silent")).classify(img), TransportError);
}

TEST(Endpoints, SyntaxAndUnreachableHosts)
{
    EXPECT_THROW(open_channel("http://x"), InvalidArgument);
    EXPECT_THROW(open_channel("tcp:localhost"), InvalidArgument);
    EXPECT_THROW(open_channel("exec:"), InvalidArgument);
    // Grab a free port, close it, then connect: nothing listens there.
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    const int port = ntohs(addr.sin_port);
    ::close(fd);
    EXPECT_THROW(open_channel("tcp:127.0.0.1:" + std::to_string(port)), ClassifierUnavailable);
}

TEST(Endpoints, TcpRoundTrip)
{
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ASSERT_EQ(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    ASSERT_EQ(::listen(listener, 1), 0);
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
    const int port = ntohs(addr.sin_port);

    std::thread server([listener] {
        for (int k = 0; k < 2; ++k) {
            const int conn = ::accept(listener, nullptr, nullptr);
            std::string buf;
            char ch;
            while (::read(conn, &ch, 1) == 1 && ch != '\n')
                buf.push_back(ch);
            const auto req = nlohmann::json::parse(buf);
            nlohmann::json resp;
            resp["id"] = req["id"];
            resp["probs"] = std::vector<double>(10, 0.1);
            const std::string out = resp.dump() + "\n";
            EXPECT_EQ(::write(conn, out.data(), out.size()), static_cast<ssize_t>(out.size()));
            ::close(conn);
        }
    });

    BridgeClassifier c("tcp:127.0.0.1:" + std::to_string(port));
    EXPECT_NEAR(c.classify(conformance_image()).probs[4], 0.1, 1e-15);
    EXPECT_NEAR(predict_external("tcp:127.0.0.1:" + std::to_string(port), conformance_image()).probs[0], 0.1, 1e-15);
    server.join();
    ::close(listener);
}
