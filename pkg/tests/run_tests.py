#!/usr/bin/env python3
"""
Test Runner for roughforge

Runs the test suites by marker and reports per suite.
"""

import subprocess
import sys
from pathlib import Path

TESTS_DIR = Path(__file__).parent


def _pytest(*args: str) -> bool:
    result = subprocess.run(
        [sys.executable, "-m", "pytest", *args, "--tb=short"],
        cwd=TESTS_DIR.parent,
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        print(result.stdout)
        print(result.stderr)
    return result.returncode == 0


def run_unit_tests(include_slow: bool = True):
    """Run unit tests"""
    print("🧪 Running Unit Tests...")
    print("=" * 50)
    marker = "not integration and not e2e"
    if not include_slow:
        marker += " and not slow"
    passed = _pytest("-m", marker)
    print("✅ Unit tests PASSED" if passed else "❌ Unit tests FAILED")
    return passed


def run_integration_tests():
    """Run integration tests"""
    print("\n🔗 Running Integration Tests...")
    print("=" * 50)
    passed = _pytest("-m", "integration")
    print("✅ Integration tests PASSED" if passed else "❌ Integration tests FAILED")
    return passed


def run_e2e_tests():
    """Run end-to-end tests"""
    print("\n🌐 Running End-to-End Tests...")
    print("=" * 50)
    passed = _pytest("-m", "e2e")
    print("✅ E2E tests PASSED" if passed else "❌ E2E tests FAILED")
    return passed


def run_all_tests():
    """Run complete test suite"""
    print("🚀 roughforge - Complete Test Suite")
    print("=" * 60)

    results = [
        ("Unit Tests", run_unit_tests()),
        ("Integration Tests", run_integration_tests()),
        ("E2E Tests", run_e2e_tests()),
    ]

    print("\n" + "=" * 60)
    print("📊 TEST RESULTS SUMMARY")
    print("=" * 60)
    for name, passed in results:
        print(f"{name:<25}{'✅ PASSED' if passed else '❌ FAILED'}")

    passed = sum(1 for _, ok in results if ok)
    print(f"\n🎯 Overall: {passed}/{len(results)} test suites passed")
    return 0 if passed == len(results) else 1


def run_quick_test():
    """Run quick smoke test"""
    print("🚀 roughforge - Quick Smoke Test")
    print("=" * 50)

    try:
        from roughforge.core.construct import SampledPath, build_isotropic, verify_path
        from roughforge.tools.commands import RoughForgeTools

        tools = RoughForgeTools()
        assert tools.trees(3, 1)["count"] == 4
        print("✅ Tree enumeration: PASSED")

        assert tools.psi("[1[2]]")["pretty"] == "[1[2]] + [2].[1]"
        print("✅ Hairer-Kelly expansion: PASSED")

        sampled = SampledPath.from_function(lambda t: (t, t * t), 3)
        assert verify_path(build_isotropic(sampled, "2/5")).passed
        print("✅ Dyadic construction: PASSED")

        print("\n🎉 Quick smoke test PASSED!")
        return 0

    except Exception as e:
        print(f"❌ Quick smoke test FAILED: {e}")
        return 1


def main():
    """Main entry point"""
    if len(sys.argv) > 1:
        if sys.argv[1] == "quick":
            return run_quick_test()
        elif sys.argv[1] == "unit":
            return 0 if run_unit_tests() else 1
        elif sys.argv[1] == "fast":
            return 0 if run_unit_tests(include_slow=False) else 1
        elif sys.argv[1] == "integration":
            return 0 if run_integration_tests() else 1
        elif sys.argv[1] == "e2e":
            return 0 if run_e2e_tests() else 1

    return run_all_tests()


if __name__ == "__main__":
    sys.exit(main())
