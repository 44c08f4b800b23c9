using System;
using System.Collections.Generic;

namespace Services.Billing
{
    public static class Invoices
    {
        public static List<string> ParseHeader(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

        public static List<string> MergeCounts(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

        public static List<string> ClampWindow(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

        public static List<string> NormalizePath(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

        public static List<string> SplitTokens(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

        public static List<string> RetryDelay(IEnumerable<string> items)
        {
            var list = new List<string>();
            foreach (var s in items)
            {
                if (string.IsNullOrWhiteSpace(s)) continue;
                list.Add(s.Trim());
            }
            return list;
        }

    }
}
