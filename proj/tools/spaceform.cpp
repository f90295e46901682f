// SPDX-License-Identifier: Apache-2.0
#include <spaceform/cli.hpp>

int main(int argc, char** argv)
{
    return spaceform::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
