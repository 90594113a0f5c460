import threading
import unittest
from io import StringIO

from relconv.utils.logger import ANSIColor, Log, get_logger


class TestANSIColor(unittest.TestCase):
    def test_green(self):
        result = ANSIColor.green("test")
        self.assertIn("test", result)
        self.assertIn("\033[32m", result)

    def test_red(self):
        result = ANSIColor.red("test")
        self.assertIn("test", result)
        self.assertIn("\033[31m", result)

    def test_yellow(self):
        result = ANSIColor.yellow("test")
        self.assertIn("\033[33m", result)

    def test_status(self):
        self.assertEqual(ANSIColor.status("PASS"), ANSIColor.green("PASS"))
        self.assertEqual(ANSIColor.status("FAIL"), ANSIColor.red("FAIL"))
        self.assertEqual(ANSIColor.status("NOTE"), ANSIColor.yellow("NOTE"))


class TestLog(unittest.TestCase):
    def setUp(self):
        Log.reset()
        self.stream = StringIO()
        Log.set_stream(self.stream)

    def tearDown(self):
        Log.reset()

    def test_singleton(self):
        self.assertIs(Log(), Log())
        self.assertIsInstance(get_logger(), Log)

    def test_set_level(self):
        Log.set_level(5)
        self.assertEqual(Log.get_level(), 5)
        Log.set_level(-3)
        self.assertEqual(Log.get_level(), 0)

    def test_silent_at_level_zero(self):
        Log.enter("axioms", "checking")
        Log.msg(lambda: "hidden")
        self.assertEqual(Log.stack(), [])
        self.assertEqual(self.stream.getvalue(), "")

    def test_message_is_lazy(self):
        calls = []

        def message():
            calls.append(1)
            return "shown"

        Log.msg(message)
        self.assertEqual(calls, [])

    def test_enter_and_exit(self):
        Log.set_level(5)
        Log.enter("verify", "z4z2")
        Log.enter("haar", "checking")
        self.assertEqual(Log.stack(), ["verify", "haar"])
        Log.exit("verify", "done")
        self.assertEqual(Log.stack(), [])
        output = self.stream.getvalue()
        self.assertIn(">> [verify] z4z2", output)
        self.assertIn(" >> [haar] checking", output)
        self.assertIn("<< [verify] done", output)

    def test_level_limits_depth(self):
        Log.set_level(2)
        Log.enter("verify", "outer")
        Log.enter("haar", "inner")
        Log.msg(lambda: "deep message")
        self.assertIn("outer", self.stream.getvalue())
        self.assertNotIn("inner", self.stream.getvalue())
        self.assertNotIn("deep message", self.stream.getvalue())

    def test_segments_filter(self):
        Log.set_level(5)
        Log.set_segments(["haar"])
        Log.enter("axioms", "hidden")
        Log.msg(lambda: "axiom message")
        Log.exit("axioms")
        Log.enter("haar", "visible")
        Log.msg(lambda: "haar message")
        output = self.stream.getvalue()
        self.assertNotIn("axiom message", output)
        self.assertIn("haar message", output)

    def test_exit_unknown_segment(self):
        Log.set_level(5)
        Log.enter("verify", "x")
        Log.exit("other")
        self.assertEqual(Log.stack(), ["verify"])

    def test_threads_keep_their_own_segments(self):
        Log.set_level(5)
        Log.enter("verify", "main")
        seen = []

        def worker():
            Log.enter("axioms", "worker")
            seen.append(list(Log.stack()))
            Log.exit("verify")
            seen.append(list(Log.stack()))

        thread = threading.Thread(target=worker)
        thread.start()
        thread.join()
        self.assertEqual(seen, [["axioms"], ["axioms"]])
        self.assertEqual(Log.stack(), ["verify"])
