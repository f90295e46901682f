// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/complex.hpp>
#include <spaceform/dec.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/forms.hpp>
#include <spaceform/geometry.hpp>
#include <spaceform/hodge.hpp>
#include <spaceform/io.hpp>
#include <spaceform/solve.hpp>
#include <spaceform/weitzenbock.hpp>
